"""
Pipeline Orchestrator for curve_pi1

Runs the stages for one member of the family in order, recording each
stage's result, error or skip, and derives the verdict and exit code.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from ..braid import central_relation_holds, monodromy_braids, self_check
from ..config import Budgets
from ..exactpoly import CurveParams, build_curve, torus_decomposition
from ..groups.finite import HomCountBudgetExceeded, fingerprint, free_product_fingerprint
from ..groups.freeproduct import find_epimorphism
from ..groups.orbifold import orbifold_pi1, torus_decomposition_note, torus_pencil_orbifold
from ..groups.presentation import zvk_presentation
from ..groups.smith import abelianization
from ..groups.tietze import tietze_simplify
from ..resolve import ResolutionBudgetExceeded, audit_family, genus_check
from ..surface import replay_nagata

logger = logging.getLogger(__name__)

VERDICT_CERTIFIED = 'certified-match'
VERDICT_MISMATCH = 'mismatch'
VERDICT_BUDGET = 'budget-exhausted'

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3

BUDGET_ERRORS = (HomCountBudgetExceeded, ResolutionBudgetExceeded)


class PipelineStage(Enum):
    """Stages in execution order."""
    BUILD = "build"                  # curve equation and torus decomposition
    AUDIT = "audit"                  # singularity at P against the claimed data
    GENUS = "genus"                  # delta of the germ against the arithmetic genus
    REPLAY = "replay"                # blow-ups and blow-downs down to the Hirzebruch surface
    MONODROMY = "monodromy"          # braids and the central twist check
    PRESENTATION = "presentation"    # Zariski-van Kampen relators
    SIMPLIFY = "simplify"            # Tietze passes
    INVARIANTS = "invariants"        # abelianization and finite-quotient fingerprints
    EPIMORPHISM = "epimorphism"      # explicit map onto Z/d * Z/N
    ORBIFOLD = "orbifold"            # torus pencil base orbifold
    VERDICT = "verdict"


DEPENDENCIES: Dict[PipelineStage, List[PipelineStage]] = {
    PipelineStage.BUILD: [],
    PipelineStage.AUDIT: [PipelineStage.BUILD],
    PipelineStage.GENUS: [PipelineStage.AUDIT],
    PipelineStage.REPLAY: [PipelineStage.AUDIT],
    PipelineStage.MONODROMY: [PipelineStage.BUILD],
    PipelineStage.PRESENTATION: [PipelineStage.MONODROMY],
    PipelineStage.SIMPLIFY: [PipelineStage.PRESENTATION],
    PipelineStage.INVARIANTS: [PipelineStage.SIMPLIFY],
    PipelineStage.EPIMORPHISM: [PipelineStage.SIMPLIFY],
    PipelineStage.ORBIFOLD: [PipelineStage.BUILD],
}


@dataclass
class StageError:
    stage: PipelineStage
    error_type: str
    message: str
    budget: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {'stage': self.stage.value, 'error_type': self.error_type, 'message': self.message}


@dataclass
class PipelineState:
    """Mutable bookkeeping for one run."""
    params: CurveParams
    stages_completed: List[PipelineStage] = field(default_factory=list)
    stages_skipped: List[PipelineStage] = field(default_factory=list)
    results: Dict[PipelineStage, Any] = field(default_factory=dict)
    errors: List[StageError] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    def is_stage_complete(self, stage: PipelineStage) -> bool:
        return stage in self.stages_completed

    def can_run(self, stage: PipelineStage) -> bool:
        return all(self.is_stage_complete(dep) for dep in DEPENDENCIES.get(stage, []))

    def mark_stage_complete(self, stage: PipelineStage, result: Any):
        self.results[stage] = result
        if stage not in self.stages_completed:
            self.stages_completed.append(stage)


@dataclass
class PipelineReport:
    params: CurveParams
    catalog: str
    budgets: Budgets
    sections: Dict[str, Any]
    errors: List[StageError]
    skipped: List[PipelineStage]
    verdict: str
    reasons: List[str]
    strict_failures: List[str]
    timings: Dict[str, float]

    def exit_code(self, strict: bool = False) -> int:
        if self.verdict == VERDICT_MISMATCH:
            return EXIT_MISMATCH
        if strict and self.strict_failures:
            return EXIT_MISMATCH
        if self.verdict == VERDICT_BUDGET:
            return EXIT_BUDGET
        return EXIT_OK

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        report = {
            'params': self.params.to_dict(),
            'curve': {
                'degree': self.params.degree,
                'multiplicity_at_P': self.params.multiplicity_at_p,
                'generic_fiber_points': self.params.generic_fiber_points,
            },
            'catalog': self.catalog,
            'budgets': self.budgets.to_dict(),
            **self.sections,
            'errors': [e.to_dict() for e in self.errors],
            'skipped': [s.value for s in self.skipped],
            'verdict': self.verdict,
            'reasons': self.reasons,
            'strict_failures': self.strict_failures,
        }
        if include_timings:
            report['timings'] = dict(self.timings)
        return report


class PipelineOrchestrator:
    """Runs the analysis stages for one (N, a, b) and assembles the report."""

    def __init__(self, budgets: Optional[Budgets] = None, catalog: str = 'small', seed: Optional[int] = None):
        """
        Args:
            budgets: search and counting limits (defaults from Config)
            catalog: target-group catalog for fingerprints
            seed: when given, the braid self-check runs with this seed
        """
        self.budgets = budgets or Budgets.from_config()
        self.catalog = catalog
        self.seed = seed

    def run_pipeline(self, params: CurveParams) -> PipelineReport:
        """
        Run every stage in order for the given parameters.

        A stage whose dependencies did not complete is skipped; a stage that
        raises is recorded as an error and the run continues.

        Args:
            params: validated curve parameters

        Returns:
            PipelineReport with per-stage sections, verdict and timings
        """
        state = PipelineState(params)
        logger.info(f"Starting pipeline for F_{{{params.N},{params.a},{params.b}}} (catalog {self.catalog})")

        steps: List[tuple] = [
            (PipelineStage.BUILD, self._build),
            (PipelineStage.AUDIT, self._audit),
            (PipelineStage.GENUS, self._genus),
            (PipelineStage.REPLAY, self._replay),
            (PipelineStage.MONODROMY, self._monodromy),
            (PipelineStage.PRESENTATION, self._presentation),
            (PipelineStage.SIMPLIFY, self._simplify),
            (PipelineStage.INVARIANTS, self._invariants),
            (PipelineStage.EPIMORPHISM, self._epimorphism),
            (PipelineStage.ORBIFOLD, self._orbifold),
        ]
        for stage, runner in steps:
            self._run_stage(state, stage, runner)

        verdict, reasons = self._verdict(state)
        strict_failures = self._strict_failures(state)
        state.mark_stage_complete(PipelineStage.VERDICT, verdict)
        logger.info(f"Pipeline finished: {verdict}")

        sections = {stage.value: self._section(stage, result)
                    for stage, result in state.results.items() if stage != PipelineStage.VERDICT}
        return PipelineReport(params, self.catalog, self.budgets, sections, state.errors,
                              state.stages_skipped, verdict, reasons, strict_failures, state.timings)

    def _run_stage(self, state: PipelineState, stage: PipelineStage, runner: Callable[[PipelineState], Any]):
        if not state.can_run(stage):
            state.stages_skipped.append(stage)
            logger.warning(f"Skipping {stage.value}: a prerequisite stage did not complete")
            return
        started = time.perf_counter()
        try:
            result = runner(state)
        except Exception as e:
            budget = isinstance(e, BUDGET_ERRORS)
            state.errors.append(StageError(stage, type(e).__name__, str(e), budget))
            logger.error(f"Stage {stage.value} failed: {type(e).__name__}: {e}")
        else:
            state.mark_stage_complete(stage, result)
            logger.info(f"Stage {stage.value} complete")
        finally:
            state.timings[stage.value] = round(time.perf_counter() - started, 6)

    # --- stages ---

    def _build(self, state: PipelineState) -> Dict[str, Any]:
        curve = build_curve(state.params)
        decomposition = torus_decomposition(state.params)
        return {'curve': curve, 'torus': decomposition, 'torus_verified': decomposition.verify(curve)}

    def _audit(self, state: PipelineState):
        return audit_family(state.params, max_steps=self.budgets.resolve_max_steps)

    def _genus(self, state: PipelineState):
        audit = state.results[PipelineStage.AUDIT]
        return genus_check(state.params, list(audit.branches.values()))

    def _replay(self, state: PipelineState):
        audit = state.results[PipelineStage.AUDIT]
        return replay_nagata(state.params, audit.branches)

    def _monodromy(self, state: PipelineState) -> Dict[str, Any]:
        params = state.params
        result = {
            'braids': monodromy_braids(params),
            'central_relation': central_relation_holds(params),
        }
        if self.seed is not None:
            result['self_check'] = self_check(max_strands=max(2, min(params.d, 6)), seed=self.seed)
        return result

    def _presentation(self, state: PipelineState):
        braids = state.results[PipelineStage.MONODROMY]['braids']
        return zvk_presentation([braids.beta_0, braids.beta_inf], state.params.d, central_exponent=state.params.N)

    def _simplify(self, state: PipelineState):
        zvk = state.results[PipelineStage.PRESENTATION]
        return tietze_simplify(zvk.presentation, budget=self.budgets.tietze_passes)

    def _invariants(self, state: PipelineState) -> Dict[str, Any]:
        pres = state.results[PipelineStage.SIMPLIFY].presentation
        d, N = state.params.d, state.params.N
        return {
            'abelianization': abelianization(pres),
            'expected_abelianization': [d * N],
            'fingerprint': fingerprint(pres, self.catalog, self.budgets.hom_tuple_cap,
                                       self.budgets.hom_workers, self.budgets.hom_chunk),
            'free_product_fingerprint': free_product_fingerprint(d, N, self.catalog),
        }

    def _epimorphism(self, state: PipelineState):
        pres = state.results[PipelineStage.SIMPLIFY].presentation
        return find_epimorphism(pres, state.params.d, state.params.N,
                                max_syllables=self.budgets.epi_max_syllables,
                                candidate_cap=self.budgets.epi_candidate_cap,
                                search_length=self.budgets.hopf_search_length)

    def _orbifold(self, state: PipelineState) -> Dict[str, Any]:
        torus = state.results[PipelineStage.BUILD]['torus']
        pencil = torus_pencil_orbifold(torus.p, torus.q, torus.f_p, torus.f_q)
        return {
            'pencil': pencil,
            'presentation': orbifold_pi1(pencil.spec),
            'note': torus_decomposition_note(torus.p, torus.q),
        }

    # --- verdict ---

    def _verdict(self, state: PipelineState) -> tuple:
        """
        certified-match needs abelianization, every fingerprint entry and an
        explicit epimorphism; any disagreement is a mismatch; otherwise the
        run ran out of budget somewhere.
        """
        reasons: List[str] = []
        mismatch = False
        exhausted = False

        group_stages = (PipelineStage.MONODROMY, PipelineStage.PRESENTATION, PipelineStage.SIMPLIFY,
                        PipelineStage.INVARIANTS, PipelineStage.EPIMORPHISM)
        for error in state.errors:
            if error.stage in group_stages:
                if error.budget:
                    exhausted = True
                    reasons.append(f"{error.stage.value}: budget exhausted ({error.message})")
                else:
                    mismatch = True
                    reasons.append(f"{error.stage.value}: {error.error_type}: {error.message}")

        monodromy = state.results.get(PipelineStage.MONODROMY)
        if monodromy is not None and not monodromy['central_relation']:
            mismatch = True
            reasons.append("central relation: beta_0 * beta_inf does not act as a power of the full twist")

        simplified = state.results.get(PipelineStage.SIMPLIFY)
        if simplified is not None and simplified.budget_exhausted:
            reasons.append("simplify: Tietze pass budget reached (presentation still valid)")

        invariants = state.results.get(PipelineStage.INVARIANTS)
        if invariants is not None:
            measured = invariants['abelianization'].factors
            if measured != invariants['expected_abelianization']:
                mismatch = True
                reasons.append(f"abelianization {measured} differs from {invariants['expected_abelianization']}")
            comparison = invariants['fingerprint'].compare(invariants['free_product_fingerprint'])
            for target, outcome in comparison.items():
                if outcome == 'mismatch':
                    mismatch = True
                    reasons.append(f"fingerprint {target} differs")
                elif outcome == 'unknown':
                    exhausted = True
                    reasons.append(f"fingerprint {target} not counted within the tuple cap")
        elif PipelineStage.INVARIANTS in state.stages_skipped:
            exhausted = True

        epimorphism = state.results.get(PipelineStage.EPIMORPHISM)
        if epimorphism is not None and not epimorphism.found:
            exhausted = True
            reasons.append(f"epimorphism: none found within {epimorphism.tried} candidates")
        elif PipelineStage.EPIMORPHISM in state.stages_skipped:
            exhausted = True

        if mismatch:
            return VERDICT_MISMATCH, reasons
        if exhausted or invariants is None or epimorphism is None:
            return VERDICT_BUDGET, reasons
        return VERDICT_CERTIFIED, reasons

    def _strict_failures(self, state: PipelineState) -> List[str]:
        """Audit, genus and replay disagreements; these only fail the run with --strict."""
        failures = [f"{e.stage.value}: {e.error_type}" for e in state.errors]
        build = state.results.get(PipelineStage.BUILD)
        if build is not None and not build['torus_verified']:
            failures.append("build: torus decomposition does not reproduce the curve")
        audit = state.results.get(PipelineStage.AUDIT)
        if audit is not None:
            failures += [f"audit: {c.name}" for c in audit.strict_mismatches]
        genus = state.results.get(PipelineStage.GENUS)
        if genus is not None and not genus.equality:
            failures.append(f"genus: delta {genus.delta_total} != {genus.arithmetic_genus_bound}")
        return failures

    # --- serialisation ---

    def _section(self, stage: PipelineStage, result: Any) -> Any:
        if stage == PipelineStage.BUILD:
            return {'terms': len(result['curve'].terms), 'torus': result['torus'].to_dict(),
                    'torus_verified': result['torus_verified']}
        if stage == PipelineStage.REPLAY:
            final = result.final
            return {
                'steps': len(result.trace),
                'blowups': sum(1 for s in result.trace if s.kind == 'blowup'),
                'blowdowns': sum(1 for s in result.trace if s.kind == 'blowdown'),
                'E.E': final.self_intersection('E'),
                'C.C': final.self_intersection('C'),
                'C.E': final.intersection('C', 'E'),
                'checkpoints': result.checkpoints,
            }
        if stage == PipelineStage.MONODROMY:
            section = {'braids': result['braids'].to_dict(), 'central_relation': result['central_relation']}
            if 'self_check' in result:
                section['self_check'] = result['self_check'].to_dict()
            return section
        if stage == PipelineStage.INVARIANTS:
            return {
                'abelianization': result['abelianization'].to_dict(),
                'expected_abelianization': result['expected_abelianization'],
                'fingerprint': result['fingerprint'].to_dict(),
                'free_product_fingerprint': result['free_product_fingerprint'].to_dict(),
                'comparison': result['fingerprint'].compare(result['free_product_fingerprint']),
            }
        if stage == PipelineStage.ORBIFOLD:
            return {'pencil': result['pencil'].to_dict(), 'presentation': result['presentation'].to_text(),
                    'note': result['note']}
        return result.to_dict()
