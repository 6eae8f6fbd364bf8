import unittest
from dataclasses import replace

from src.curve_pi1.config import Budgets
from src.curve_pi1.exactpoly import CurveParams
from src.curve_pi1.groups.finite import HomCountBudgetExceeded
from src.curve_pi1.groups.freeproduct import EpimorphismSearch
from src.curve_pi1.services.pipeline_orchestrator import (EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, VERDICT_BUDGET,
                                                          VERDICT_CERTIFIED, VERDICT_MISMATCH, PipelineOrchestrator,
                                                          PipelineStage, PipelineState)
from src.curve_pi1.services.report_renderer import render_report
from src.curve_pi1.surface import SurfaceError

ORCHESTRATOR = 'src.curve_pi1.services.pipeline_orchestrator'


def small_budgets(**overrides):
    return replace(Budgets.from_config(), **overrides)


class TestPipelineSmallestMember(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.params = CurveParams(3, 1, 1)
        cls.report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(cls.params)

    def test_certified(self):
        self.assertEqual(self.report.verdict, VERDICT_CERTIFIED)
        self.assertEqual(self.report.exit_code(), EXIT_OK)
        self.assertEqual(self.report.exit_code(strict=True), EXIT_OK)
        self.assertEqual(self.report.errors, [])
        self.assertEqual(self.report.skipped, [])

    def test_sections(self):
        data = self.report.to_dict()
        self.assertEqual(data['curve'], {'degree': 6, 'multiplicity_at_P': 4, 'generic_fiber_points': 2})
        self.assertTrue(data['build']['torus_verified'])
        self.assertEqual(data['invariants']['abelianization']['factors'], [6])
        self.assertEqual(data['replay']['E.E'], -3)
        self.assertEqual(data['replay']['C.C'], 12)
        self.assertTrue(data['monodromy']['central_relation'])
        self.assertTrue(data['epimorphism']['found'])
        self.assertEqual(data['orbifold']['pencil']['spec']['cone_points'], [3, 2])
        self.assertNotIn('timings', data)
        self.assertNotIn('verdict', self.report.sections)

    def test_timings_only_on_request(self):
        data = self.report.to_dict(include_timings=True)
        self.assertEqual(set(data['timings']), {stage.value for stage in PipelineStage} - {'verdict'})

    def test_output_is_deterministic(self):
        again = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(self.params)
        self.assertEqual(again.to_dict(), self.report.to_dict())

    def test_rendered_report(self):
        text = render_report(self.report.to_dict())
        self.assertIn("certified-match", text)
        self.assertIn("Sym3", text)


def test_seed_adds_self_check():
    report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny', seed=3).run_pipeline(CurveParams(3, 1, 1))
    assert report.to_dict()['monodromy']['self_check']['passed']


def test_replay_failure_only_fails_strict_runs(mocker):
    # Arrange
    mocker.patch(f'{ORCHESTRATOR}.replay_nagata', side_effect=SurfaceError("chain does not contract"))

    # Act
    report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(CurveParams(3, 1, 1))

    # Assert
    assert report.verdict == VERDICT_CERTIFIED
    assert report.exit_code() == EXIT_OK
    assert report.exit_code(strict=True) == EXIT_MISMATCH
    assert report.strict_failures == ["replay: SurfaceError"]


def test_group_stage_error_is_a_mismatch(mocker):
    mocker.patch(f'{ORCHESTRATOR}.fingerprint', side_effect=RuntimeError("table corrupted"))

    report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(CurveParams(3, 1, 1))

    assert report.verdict == VERDICT_MISMATCH
    assert report.exit_code() == EXIT_MISMATCH
    assert report.to_dict()['errors'][0]['stage'] == 'invariants'


def test_budget_error_in_group_stage(mocker):
    mocker.patch(f'{ORCHESTRATOR}.fingerprint', side_effect=HomCountBudgetExceeded('Sym5', 10 ** 6, 10))

    report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(CurveParams(3, 1, 1))

    assert report.verdict == VERDICT_BUDGET
    assert report.exit_code() == EXIT_BUDGET


def test_missing_epimorphism_exhausts_budget(mocker):
    mocker.patch(f'{ORCHESTRATOR}.find_epimorphism', return_value=EpimorphismSearch(None, 12, True))

    report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(CurveParams(3, 1, 1))

    assert report.verdict == VERDICT_BUDGET
    assert report.exit_code() == EXIT_BUDGET
    assert any("epimorphism" in reason for reason in report.reasons)


def test_failed_build_skips_everything_downstream(mocker):
    mocker.patch(f'{ORCHESTRATOR}.build_curve', side_effect=RuntimeError("no curve"))

    report = PipelineOrchestrator(budgets=small_budgets(), catalog='tiny').run_pipeline(CurveParams(3, 1, 1))

    assert PipelineStage.AUDIT in report.skipped
    assert PipelineStage.EPIMORPHISM in report.skipped
    assert report.verdict == VERDICT_BUDGET
    assert report.exit_code(strict=True) == EXIT_MISMATCH


def test_larger_member_within_small_budgets():
    budgets = small_budgets(epi_max_syllables=2)
    report = PipelineOrchestrator(budgets=budgets, catalog='tiny').run_pipeline(CurveParams(5, 1, 2))

    assert report.verdict in (VERDICT_CERTIFIED, VERDICT_BUDGET)
    assert report.to_dict()['invariants']['abelianization']['factors'] == [15]


def test_state_dependencies():
    state = PipelineState(CurveParams(3, 1, 1))
    assert state.can_run(PipelineStage.BUILD)
    assert not state.can_run(PipelineStage.AUDIT)
    state.mark_stage_complete(PipelineStage.BUILD, {})
    assert state.can_run(PipelineStage.AUDIT)
    assert state.is_stage_complete(PipelineStage.BUILD)
