import os
import unittest

import pytest
import yaml

from src.curve_pi1.exactpoly import CurveParams
from src.curve_pi1.resolve import audit_family
from src.curve_pi1.surface import (DivisorConfiguration, SurfaceError, blowdown, blowup, make_point,
                                   projective_plane_configuration, replay_nagata, retag)

GOLDEN_PATH = os.path.join(os.path.dirname(__file__), 'golden', 'surface_end_states.yaml')


def two_lines(local=1):
    """Two curves of self-intersection 1 meeting only at Q."""
    config = DivisorConfiguration()
    config.add_divisor('L1', 1, 'curve').add_divisor('L2', 1, 'curve')
    config.set_intersection('L1', 'L2', local)
    config.add_point(make_point('Q', {'L1': 1, 'L2': 1}, {('L1', 'L2'): local}))
    return config


class TestBlowupBlowdown(unittest.TestCase):

    def setUp(self):
        self.config = two_lines()

    def test_blowup_separates_the_lines(self):
        # Act
        blown = blowup(self.config, 'Q', 'E')

        # Assert
        self.assertEqual(blown.self_intersection('L1'), 0)
        self.assertEqual(blown.self_intersection('L2'), 0)
        self.assertEqual(blown.self_intersection('E'), -1)
        self.assertEqual(blown.intersection('L1', 'L2'), 0)
        self.assertEqual(blown.intersection('E', 'L1'), 1)
        self.assertEqual(sorted(blown.points), ['E/L1', 'E/L2'])
        blown.validate()

    def test_blowup_leaves_input_untouched(self):
        blowup(self.config, 'Q', 'E')
        self.assertIn('Q', self.config.points)
        self.assertNotIn('E', self.config.divisors)

    def test_blowdown_restores_the_configuration(self):
        restored = blowdown(blowup(self.config, 'Q', 'E'), 'E')

        self.assertEqual(restored.self_intersection('L1'), 1)
        self.assertEqual(restored.intersection('L1', 'L2'), 1)
        self.assertEqual(list(restored.points), ['E*'])
        self.assertEqual(restored.points['E*'].local_between('L1', 'L2'), 1)
        restored.validate()

    def test_blowdown_preconditions(self):
        with self.assertRaises(SurfaceError):
            blowdown(self.config, 'L1')
        config = DivisorConfiguration().add_divisor('C', -1, 'curve')
        with self.assertRaises(SurfaceError):
            blowdown(config, 'C')
        with self.assertRaises(SurfaceError):
            blowdown(self.config, 'missing')

    def test_default_residual_refuses_tangency(self):
        with self.assertRaises(SurfaceError):
            blowup(two_lines(local=2), 'Q', 'E')

    def test_unknown_point_and_name_clash(self):
        with self.assertRaises(SurfaceError):
            blowup(self.config, 'nowhere', 'E')
        with self.assertRaises(SurfaceError):
            blowup(self.config, 'Q', 'L1')

    def test_retag_changes_role_only(self):
        tagged = retag(self.config, 'L1', 'fiber')
        self.assertEqual(tagged.divisors['L1'].role, 'fiber')
        self.assertEqual(tagged.self_intersection('L1'), 1)
        with self.assertRaises(SurfaceError):
            retag(self.config, 'L1', 'mystery')


def test_validate_reports_inconsistent_locals():
    config = two_lines()
    config.set_intersection('L1', 'L2', 3)
    with pytest.raises(SurfaceError, match="L1.L2"):
        config.validate()


def test_plane_configuration_is_consistent():
    config = projective_plane_configuration(CurveParams(3, 1, 1))
    config.validate()
    assert config.self_intersection('C') == 36
    assert config.points['P'].multiplicities['C'] == 4


class TestNagataReplay(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        with open(GOLDEN_PATH, 'r', encoding='utf-8') as f:
            cls.golden = yaml.safe_load(f)

    def test_end_states_match_golden(self):
        for expected in self.golden:
            params = CurveParams(**expected['params'])
            with self.subTest(params=expected['params']):
                # Arrange
                audit = audit_family(params)

                # Act
                replay = replay_nagata(params, audit.branches)

                # Assert
                final = replay.final
                self.assertEqual(final.self_intersection('E'), expected['E.E'])
                self.assertEqual(final.self_intersection('C'), expected['C.C'])
                self.assertEqual(final.intersection('C', 'E'), expected['C.E'])
                for tag in ('inf', '0'):
                    fiber = f"E_{tag}^{params.m}"
                    self.assertEqual(final.divisors[fiber].role, 'fiber')
                    self.assertEqual(final.self_intersection(fiber), expected['fiber_self'])
                    self.assertEqual(final.intersection('C', fiber), expected['C.fiber'])
                kinds = [step.kind for step in replay.trace]
                self.assertEqual(kinds.count('blowup'), expected['blowups'])
                self.assertEqual(kinds.count('blowdown'), expected['blowdowns'])

    def test_first_checkpoint(self):
        params = CurveParams(3, 1, 1)
        replay = replay_nagata(params, audit_family(params).branches)

        sigma_1 = replay.checkpoints['sigma_1']
        self.assertEqual(sigma_1['C.E'], 2 * params.m * params.d)
        self.assertEqual(sigma_1['C'], 36 - 16)
        self.assertEqual(sigma_1['E'], -1)

    def test_missing_branch_data(self):
        with self.assertRaises(SurfaceError):
            replay_nagata(CurveParams(3, 1, 1), {})
