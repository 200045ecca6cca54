"""
Command-line tests: subcommands, exit codes and result files.
"""

import numpy as np
import pytest

import main
from scenarios.runners import run_scenario
from scenarios.sweep_engine import SweepError
from utils.config_loader import ConfigLoader
from utils.data_logger import CONFIG_MARK, MANIFEST_MARK, format_result, read_result

SMALL_RELAX = ['--config', 'fig5', '--set', 'K=20', '--set', 'time.values=[0, 1, 5]', '--workers', '1']


def data_lines(path):
    return [line for line in path.read_text().splitlines() if not line.startswith('#')]


def test_presets_listing(capsys):
    assert main.run('presets') == main.EXIT_OK
    out = capsys.readouterr().out
    names = [line.split()[0] for line in out.splitlines()]
    assert len(names) >= 8
    assert 'fig5' in names


def test_relax_writes_result(tmp_path):
    out = tmp_path / 'relax.csv'
    assert main.run('relax', [*SMALL_RELAX, '--out', str(out)]) == main.EXIT_OK
    frame, config, manifest = read_result(out)
    assert list(frame.columns)[:2] == ['t', 'N_1']
    assert list(frame['t']) == [0.0, 1.0, 5.0]
    assert config.bath.level_count == 20
    assert manifest['scenario'] == 'relaxation'
    assert manifest['config_path'] == 'fig5'


def test_override_is_echoed(tmp_path):
    out = tmp_path / 'junction.csv'
    flags = ['--config', 'fig6a', '--set', 'V=15', '--set', 'K=10', '--set', 'time.values=[0, 2]', '--out', str(out)]
    assert main.run('junction', flags) == main.EXIT_OK
    frame, config, _ = read_result(out)
    assert config.junction.voltage == 15.0
    assert len(frame) == 2


def test_single_point_file(tmp_path):
    out = tmp_path / 'gc.csv'
    assert main.run('equilibrium-gc', ['--set', 'K=10', '--out', str(out), '--workers', '1']) == main.EXIT_OK
    lines = data_lines(out)
    assert len(lines) == 2
    assert lines[0] == 'gamma,N_1,N_2,N_3,N_4,n_0'
    text = out.read_text()
    assert text.startswith(MANIFEST_MARK)
    assert CONFIG_MARK in text


def test_emitted_chain_is_monotone(tmp_path):
    out = tmp_path / 'fig1.csv'
    flags = ['--config', 'fig1', '--set', 'K=40', '--set', 'sweep.values=[0.5, 2, 8]', '--out', str(out)]
    assert main.run('equilibrium-gc', flags) == main.EXIT_OK
    frame, _, _ = read_result(out)
    values = frame[['N_1', 'N_2', 'N_3', 'N_4']].to_numpy()
    assert np.all(np.diff(values, axis=1) >= -1e-10)


def test_stdout_output(capsys):
    assert main.run('equilibrium-canonical', ['--set', 'K=3', '--set', 'N=2']) == main.EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith(MANIFEST_MARK)
    assert 'gamma,N,N_gc,n_0' in out


def test_results_are_reproducible(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    assert main.run('relax', [*SMALL_RELAX, '--out', str(first)]) == main.EXIT_OK
    assert main.run('relax', [*SMALL_RELAX, '--out', str(second)]) == main.EXIT_OK
    assert data_lines(first) == data_lines(second)


def test_reemission_is_identical():
    loader = ConfigLoader('fig1')
    loader.apply_override('K=10')
    loader.apply_override('sweep.values=[0.5, 2.0]')
    result = run_scenario(loader.resolve(), workers=1)
    assert format_result(result) == format_result(result)


def test_written_values_parse_back(tmp_path):
    loader = ConfigLoader('fig5', 'relaxation')
    loader.apply_override('K=20')
    loader.apply_override('time.values=[0, 1, 5]')
    result = run_scenario(loader.resolve(), workers=1)
    out = tmp_path / 'relax.csv'
    assert main.run('relax', [*SMALL_RELAX, '--out', str(out)]) == main.EXIT_OK
    frame, config, _ = read_result(out)
    assert config == result.config
    np.testing.assert_allclose(frame.to_numpy(dtype=float), result.frame.to_numpy(dtype=float), rtol=1e-11, atol=1e-300)


class TestExitCodes:
    def test_invalid_config_value(self, capsys):
        assert main.run('junction', ['--set', 'a=1.5']) == main.EXIT_CONFIG
        assert 'asymmetry' in capsys.readouterr().err

    def test_unknown_preset(self):
        assert main.run('relax', ['--config', 'fig99']) == main.EXIT_CONFIG

    def test_unknown_flag(self):
        assert main.run('relax', ['--bogus']) == main.EXIT_CONFIG

    def test_computation_failure(self, monkeypatch, capsys):
        def failing(config, workers=None):
            raise SweepError('gamma', 2.0, 1, ValueError('eigensolver did not converge'))
        monkeypatch.setattr(main, 'run_scenario', failing)
        assert main.run('equilibrium-gc', ['--set', 'K=10']) == main.EXIT_COMPUTATION
        assert 'gamma=2' in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path):
        out = tmp_path / 'missing' / 'result.csv'
        assert main.run('equilibrium-gc', ['--set', 'K=10', '--out', str(out)]) == main.EXIT_OUTPUT

    def test_main_exits_with_status(self):
        with pytest.raises(SystemExit) as info:
            main.main([])
        assert info.value.code == main.EXIT_CONFIG
        with pytest.raises(SystemExit) as info:
            main.main(['presets'])
        assert info.value.code == main.EXIT_OK
