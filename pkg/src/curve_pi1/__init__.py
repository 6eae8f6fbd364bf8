import json
import logging
import sys

import click

from src.curve_pi1.braid import BraidError, BraidWord, FreeWord, automorphism, hurwitz_act, self_check
from src.curve_pi1.config import LOG_FORMAT, Config, load_budgets
from src.curve_pi1.exactpoly import CurveParams, CurveParamsError, PolynomialError, build_curve, dehomogenize, \
    parse_polynomial
from src.curve_pi1.groups.finite import CATALOGS, fingerprint
from src.curve_pi1.groups.orbifold import OrbifoldSpec, orbifold_pi1, torus_decomposition_note, \
    torus_pencil_orbifold
from src.curve_pi1.groups.presentation import PresentationError, parse_presentation
from src.curve_pi1.groups.smith import abelianization
from src.curve_pi1.resolve import ResolutionBudgetExceeded, ResolutionError, audit_family, genus_check, \
    resolve_branch, resolve_germ
from src.curve_pi1.services.pipeline_orchestrator import EXIT_BUDGET, EXIT_INVALID, EXIT_MISMATCH, EXIT_OK, \
    PipelineOrchestrator
from src.curve_pi1.services.report_renderer import render_report
from src.curve_pi1.surface import SurfaceError, replay_nagata

logger = logging.getLogger(__name__)

LOCAL_VARIABLES = ('x', 'y')


def _dump(data) -> str:
    return json.dumps(data, indent=2)


def _params_or_exit(N: int, a: int, b: int) -> CurveParams:
    try:
        return CurveParams(N, a, b)
    except CurveParamsError as e:
        click.echo(f"❌ Invalid parameters: {e}", err=True)
        sys.exit(EXIT_INVALID)


def create_cli(config_class=Config) -> click.Group:
    logging.basicConfig(level=getattr(logging, str(config_class.LOG_LEVEL).upper(), logging.INFO),
                        format=LOG_FORMAT)

    @click.group()
    def cli():
        """Fundamental groups of complements of the curves F_{N,a,b}."""

    # =============================================================================
    # FULL PIPELINE
    # =============================================================================

    @click.command(name='analyze')
    @click.option('--N', 'N', required=True, type=int, help='Odd degree parameter N = 2m+1.')
    @click.option('--a', required=True, type=int, help='Exponent a (coprime to b).')
    @click.option('--b', required=True, type=int, help='Exponent b (coprime to a).')
    @click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write the JSON report here.')
    @click.option('--strict', is_flag=True, help='Fail on any audit, genus or stage failure.')
    @click.option('--catalog', type=click.Choice(sorted(CATALOGS.keys())), default=config_class.DEFAULT_CATALOG,
                  help='Target groups for the finite-quotient fingerprint.')
    @click.option('--seed', type=int, help='Seed for the braid self-check (never changes the results).')
    @click.option('--budgets', 'budgets_path', type=click.Path(exists=True, dir_okay=False),
                  help='YAML file overriding search and counting budgets.')
    @click.option('--timings', is_flag=True, help='Include per-stage timings in the report.')
    def analyze_command(N, a, b, json_path, strict, catalog, seed, budgets_path, timings):
        """Run every stage for one (N, a, b) and report the verdict."""
        params = _params_or_exit(N, a, b)
        try:
            budgets = load_budgets(budgets_path, config_class)
        except (OSError, ValueError) as e:
            click.echo(f"❌ Invalid budgets: {e}", err=True)
            sys.exit(EXIT_INVALID)

        orchestrator = PipelineOrchestrator(budgets=budgets, catalog=catalog, seed=seed)
        report = orchestrator.run_pipeline(params)
        data = report.to_dict(include_timings=timings)
        if json_path:
            with open(json_path, 'w', encoding='utf-8') as f:
                f.write(_dump(data) + "\n")
            click.echo(f"💾 Report written to {json_path}")
        click.echo(render_report(data))
        sys.exit(report.exit_code(strict))

    # =============================================================================
    # SINGLE STAGES
    # =============================================================================

    @click.command(name='resolve')
    @click.option('--N', 'N', type=int, help='Resolve the germ of F_{N,a,b} at P.')
    @click.option('--a', type=int)
    @click.option('--b', type=int)
    @click.option('--poly', type=str, help='A local equation in x, y, e.g. "y^2 - x^3".')
    @click.option('--direction', type=str, help='Tangent label for --poly: "y=0", "x=0" or "y=<t>x".')
    @click.option('--full-trace', is_flag=True, help='Blow up every point instead of closing with the Euclid tail.')
    def resolve_command(N, a, b, poly, direction, full_trace):
        """Branch data (multiplicities, proximity, characteristic exponents, delta) as JSON."""
        family = (N, a, b)
        if poly is None and None in family:
            click.echo("❌ Specify either --N/--a/--b or --poly", err=True)
            sys.exit(EXIT_INVALID)
        if poly is not None and any(v is not None for v in family):
            click.echo("❌ --poly cannot be combined with --N/--a/--b", err=True)
            sys.exit(EXIT_INVALID)

        try:
            if poly is not None:
                branch = resolve_branch(parse_polynomial(poly, LOCAL_VARIABLES), direction,
                                        shortcut=not full_trace, max_steps=config_class.RESOLVE_MAX_STEPS)
                data = branch.to_dict()
            else:
                params = _params_or_exit(N, a, b)
                local = dehomogenize(build_curve(params), 'z')
                branches = resolve_germ(local, shortcut=not full_trace, max_steps=config_class.RESOLVE_MAX_STEPS)
                data = {'params': params.to_dict(), 'branches': [br.to_dict() for br in branches],
                        'genus': genus_check(params, branches).to_dict()}
        except PolynomialError as e:
            click.echo(f"❌ Could not parse polynomial: {e}", err=True)
            sys.exit(EXIT_INVALID)
        except ResolutionBudgetExceeded as e:
            click.echo(f"⏳ {e}", err=True)
            sys.exit(EXIT_BUDGET)
        except ResolutionError as e:
            click.echo(f"❌ {type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_INVALID)
        click.echo(_dump(data))

    @click.command(name='surface')
    @click.option('--N', 'N', required=True, type=int)
    @click.option('--a', required=True, type=int)
    @click.option('--b', required=True, type=int)
    def surface_command(N, a, b):
        """Replay the blow-ups and blow-downs that end on the Hirzebruch surface; trace as JSON."""
        params = _params_or_exit(N, a, b)
        try:
            audit = audit_family(params, max_steps=config_class.RESOLVE_MAX_STEPS)
            replay = replay_nagata(params, audit.branches)
        except ResolutionBudgetExceeded as e:
            click.echo(f"⏳ {e}", err=True)
            sys.exit(EXIT_BUDGET)
        except SurfaceError as e:
            click.echo(f"❌ Surface replay failed: {e}", err=True)
            sys.exit(EXIT_MISMATCH)
        click.echo(_dump(replay.to_dict()))

    # --- braids ---

    @click.group(name='braid')
    def braid_group():
        """Hurwitz action of braids on free groups."""

    @click.command(name='act')
    @click.option('--strands', required=True, type=int, help='Number of strands d.')
    @click.option('--braid', 'braid_text', required=True, type=str, help='Braid word, e.g. "s1 s2^-1".')
    @click.option('--word', 'word_text', type=str, help='Free word in m1..md; omit to print all generator images.')
    def braid_act_command(strands, braid_text, word_text):
        """Apply a braid to a free word (or to every generator)."""
        try:
            braid = BraidWord.parse(braid_text, strands)
            if word_text is None:
                images = automorphism(braid)
                for i, image in enumerate(images, start=1):
                    click.echo(f"m{i} -> {image.to_text()}")
                return
            click.echo(hurwitz_act(braid, FreeWord.parse(word_text, strands)).to_text())
        except BraidError as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(EXIT_INVALID)

    @click.command(name='selfcheck')
    @click.option('--max-strands', default=4, type=int)
    @click.option('--samples', default=20, type=int)
    @click.option('--seed', default=0, type=int)
    def braid_selfcheck_command(max_strands, samples, seed):
        """Random-sample checks of the action, braid relations and the central full twist."""
        report = self_check(max_strands=max_strands, samples=samples, seed=seed)
        for name, ok in report.checks.items():
            click.echo(f"{'✅' if ok else '❌'} {name}")
        sys.exit(EXIT_OK if report.passed else EXIT_MISMATCH)

    braid_group.add_command(braid_act_command)
    braid_group.add_command(braid_selfcheck_command)

    # --- groups ---

    @click.group(name='group')
    def group_group():
        """Invariants of finitely presented groups."""

    def _presentation_or_exit(text):
        try:
            return parse_presentation(text)
        except PresentationError as e:
            click.echo(f"❌ Could not parse presentation: {e}", err=True)
            sys.exit(EXIT_INVALID)

    @click.command(name='fingerprint')
    @click.option('--presentation', 'text', required=True, type=str, help='e.g. "< a b | a^2, b^3 >".')
    @click.option('--catalog', type=click.Choice(sorted(CATALOGS.keys())), default=config_class.DEFAULT_CATALOG)
    def group_fingerprint_command(text, catalog):
        """Homomorphism counts into the catalog's target groups, as JSON."""
        result = fingerprint(_presentation_or_exit(text), catalog)
        click.echo(_dump(result.to_dict()))
        sys.exit(EXIT_OK if result.complete else EXIT_BUDGET)

    @click.command(name='abelianize')
    @click.option('--presentation', 'text', required=True, type=str)
    def group_abelianize_command(text):
        """Invariant factors of the abelianization."""
        click.echo(abelianization(_presentation_or_exit(text)).to_text())

    group_group.add_command(group_fingerprint_command)
    group_group.add_command(group_abelianize_command)

    @click.command(name='orbifold')
    @click.option('--punctures', default=0, type=int, help='Number of removed points.')
    @click.option('--cone', 'cones', multiple=True, type=int, help='Cone point order (repeatable).')
    @click.option('--torus', nargs=2, type=int, help='Base orbifold of the (p, q) torus pencil.')
    def orbifold_command(punctures, cones, torus):
        """Orbifold fundamental group of a genus-0 base, as JSON."""
        try:
            if torus:
                pencil = torus_pencil_orbifold(*torus)
                spec = pencil.spec
                data = {'pencil': pencil.to_dict(), 'note': torus_decomposition_note(*torus)}
            else:
                spec = OrbifoldSpec(punctures, tuple(cones))
                data = {'spec': spec.to_dict()}
        except ValueError as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(EXIT_INVALID)
        pres = orbifold_pi1(spec)
        data['presentation'] = pres.to_text()
        data['abelianization'] = abelianization(pres).to_text()
        click.echo(_dump(data))

    # --- Register CLI Commands ---
    cli.add_command(analyze_command)
    cli.add_command(resolve_command)
    cli.add_command(surface_command)
    cli.add_command(braid_group)
    cli.add_command(group_group)
    cli.add_command(orbifold_command)

    return cli
