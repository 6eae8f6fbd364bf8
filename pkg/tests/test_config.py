import os

import pytest

from src.curve_pi1.config import Budgets, Config, load_budgets


class SmallConfig(Config):
    TIETZE_MAX_PASSES = 7
    EPI_MAX_SYLLABLES = 1


def write_yaml(tmpdir, text):
    path = os.path.join(str(tmpdir), 'budgets.yaml')
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    return path


def test_defaults_follow_config_class():
    budgets = load_budgets(None, SmallConfig)
    assert budgets.tietze_passes == 7
    assert budgets.epi_max_syllables == 1
    assert budgets.hom_workers == Config.HOM_WORKERS


def test_yaml_overrides_selected_keys(tmpdir):
    # Arrange
    path = write_yaml(tmpdir, "hom_tuple_cap: 1000\nhopf_ball_radius: 3\n")

    # Act
    budgets = load_budgets(path, SmallConfig)

    # Assert
    assert budgets.hom_tuple_cap == 1000
    assert budgets.hopf_ball_radius == 3
    assert budgets.tietze_passes == 7


def test_empty_file_keeps_defaults(tmpdir):
    assert load_budgets(write_yaml(tmpdir, ""), SmallConfig) == Budgets.from_config(SmallConfig)


@pytest.mark.parametrize("text,message", [
    ("tuple_cap: 5\n", "Unknown budget keys"),
    ("hom_workers: -1\n", "non-negative integer"),
    ("hom_chunk: 2.5\n", "non-negative integer"),
    ("epi_max_syllables: true\n", "non-negative integer"),
    ("- 1\n- 2\n", "must contain a mapping"),
])
def test_invalid_budget_files(tmpdir, text, message):
    with pytest.raises(ValueError, match=message):
        load_budgets(write_yaml(tmpdir, text))


def test_budgets_serialise_every_field():
    data = Budgets().to_dict()
    assert set(data) == {'tietze_passes', 'hopf_search_length', 'hopf_ball_radius', 'hom_tuple_cap', 'hom_workers',
                         'hom_chunk', 'epi_max_syllables', 'epi_candidate_cap', 'resolve_max_steps'}
