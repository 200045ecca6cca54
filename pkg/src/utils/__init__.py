# Configuration, logging and result files
