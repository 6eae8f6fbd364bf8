import json
import os

import pytest
from click.testing import CliRunner

from src.curve_pi1 import create_cli


@pytest.fixture
def cli():
    return create_cli()


@pytest.fixture
def runner():
    return CliRunner()


class TestAnalyzeCommand:

    def test_smallest_member_is_certified(self, cli, runner, tmpdir):
        # Arrange
        json_path = os.path.join(str(tmpdir), 'report.json')

        # Act
        result = runner.invoke(cli, ['analyze', '--N', '3', '--a', '1', '--b', '1', '--catalog', 'tiny',
                                     '--json', json_path])

        # Assert
        assert result.exit_code == 0, result.output
        assert "Verdict: certified-match" in result.stdout
        with open(json_path, 'r', encoding='utf-8') as f:
            report = json.load(f)
        assert report['verdict'] == 'certified-match'
        assert report['params'] == {'N': 3, 'a': 1, 'b': 1, 'm': 1, 'd': 2}
        assert 'timings' not in report

    def test_invalid_parameters_exit_two(self, cli, runner):
        result = runner.invoke(cli, ['analyze', '--N', '4', '--a', '1', '--b', '1'])
        assert result.exit_code == 2

    def test_budget_file_with_unknown_key(self, cli, runner, tmpdir):
        path = os.path.join(str(tmpdir), 'budgets.yaml')
        with open(path, 'w', encoding='utf-8') as f:
            f.write("mystery: 3\n")
        result = runner.invoke(cli, ['analyze', '--N', '3', '--a', '1', '--b', '1', '--budgets', path])
        assert result.exit_code == 2

    def test_exhausted_budget_exits_three(self, cli, runner, tmpdir):
        path = os.path.join(str(tmpdir), 'budgets.yaml')
        with open(path, 'w', encoding='utf-8') as f:
            f.write("hom_tuple_cap: 1\n")
        result = runner.invoke(cli, ['analyze', '--N', '3', '--a', '1', '--b', '1', '--catalog', 'tiny',
                                     '--budgets', path, '--timings'])
        assert result.exit_code == 3
        assert "budget-exhausted" in result.stdout


class TestResolveCommand:

    def test_single_germ(self, cli, runner):
        result = runner.invoke(cli, ['resolve', '--poly', 'y^2 - x^3'])

        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data['mult_sequence'] == [2]
        assert data['char_exponents'] == [2, 3]

    def test_family_member(self, cli, runner):
        result = runner.invoke(cli, ['resolve', '--N', '3', '--a', '1', '--b', '1', '--full-trace'])

        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert [b['mult_sequence'] for b in data['branches']] == [[2, 2, 2], [2, 2, 2]]
        assert data['genus']['equality'] is True

    @pytest.mark.parametrize("args", [
        [],
        ['--poly', 'y^2 - x^3', '--N', '3'],
        ['--poly', 'y^2 - x^4'],
        ['--poly', 'y^2 ; x'],
        ['--N', '3', '--a', '2', '--b', '2'],
    ])
    def test_invalid_input_exits_two(self, cli, runner, args):
        assert runner.invoke(cli, ['resolve'] + args).exit_code == 2


def test_surface_command(cli, runner):
    result = runner.invoke(cli, ['surface', '--N', '3', '--a', '1', '--b', '1'])

    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data['final']['divisors']['E']['self_intersection'] == -3
    assert data['checkpoints']['sigma_1']['C.E'] == 4


class TestBraidCommands:

    def test_generator_images(self, cli, runner):
        result = runner.invoke(cli, ['braid', 'act', '--strands', '2', '--braid', 's1'])
        assert result.exit_code == 0
        assert result.stdout.splitlines() == ["m1 -> m2", "m2 -> m2 m1 m2^-1"]

    def test_single_word(self, cli, runner):
        result = runner.invoke(cli, ['braid', 'act', '--strands', '3', '--braid', 's1 s2', '--word', 'm3 m2 m1'])
        assert result.stdout.strip() == "m3 m2 m1"

    def test_bad_braid(self, cli, runner):
        result = runner.invoke(cli, ['braid', 'act', '--strands', '2', '--braid', 's2'])
        assert result.exit_code == 2

    def test_selfcheck(self, cli, runner):
        result = runner.invoke(cli, ['braid', 'selfcheck', '--max-strands', '3', '--samples', '5'])
        assert result.exit_code == 0
        assert "❌" not in result.stdout


class TestGroupCommands:

    def test_abelianize(self, cli, runner):
        result = runner.invoke(cli, ['group', 'abelianize', '--presentation', '< a b | a^2, b^3 >'])
        assert result.stdout.strip() == "Z/6"

    def test_fingerprint(self, cli, runner):
        result = runner.invoke(cli, ['group', 'fingerprint', '--presentation', '< a b | a^2, b^3 >',
                                     '--catalog', 'tiny'])
        assert result.exit_code == 0
        counts = {e['target']: e['count'] for e in json.loads(result.stdout)['entries']}
        assert counts == {'trivial': 1, 'C2': 2, 'C3': 3, 'Sym3': 12}

    def test_malformed_presentation(self, cli, runner):
        result = runner.invoke(cli, ['group', 'fingerprint', '--presentation', 'a^2'])
        assert result.exit_code == 2


class TestOrbifoldCommand:

    def test_torus_pencil(self, cli, runner):
        result = runner.invoke(cli, ['orbifold', '--torus', '2', '3'])

        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data['pencil']['fiber_multiplicities'] == {'[0:1]': 3, '[1:0]': 2}
        assert data['abelianization'] == "Z/6"
        assert data['note'] is None

    def test_cone_points(self, cli, runner):
        result = runner.invoke(cli, ['orbifold', '--punctures', '1', '--cone', '2', '--cone', '3'])
        assert json.loads(result.stdout)['spec']['cone_points'] == [2, 3]

    def test_non_coprime_torus(self, cli, runner):
        assert runner.invoke(cli, ['orbifold', '--torus', '2', '4']).exit_code == 2
