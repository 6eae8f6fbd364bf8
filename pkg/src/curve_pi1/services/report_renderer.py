"""
Text rendering of pipeline reports. Reads only the JSON dictionary.
"""

from typing import Any, Dict, List

RULE = "=" * 72

VERDICT_ICONS = {
    'certified-match': '✅',
    'mismatch': '❌',
    'budget-exhausted': '⏳',
}


def _mark(ok: bool) -> str:
    return '✅' if ok else '❌'


def _render_audit(audit: Dict[str, Any]) -> List[str]:
    lines = [f"🔍 Singularity at P: multiplicity {audit['multiplicity']}, tangent cone {audit['tangent_cone']}",
             f"   aN direction: {audit['a_direction']}   bN direction: {audit['b_direction']}"]
    for claim in audit['claims']:
        ok = claim['verdict'] == 'match'
        icon = _mark(ok) if not claim['informational'] else ('ℹ️ ' if not ok else '✅')
        lines.append(f"   {icon} {claim['name']}: measured {claim['measured']}, claimed {claim['claimed']}")
    for label, branch in audit['branches'].items():
        lines.append(f"   🌿 branch {label}: multiplicities {branch['mult_sequence']}, "
                     f"characteristic exponents {branch['char_exponents']}, delta {branch['delta']}")
    return lines


def _render_invariants(inv: Dict[str, Any]) -> List[str]:
    ab = inv['abelianization']
    lines = [f"🧮 Abelianization: {ab['text']} {_mark(ab['factors'] == inv['expected_abelianization'])}"]
    theirs = {e['target']: e['count'] for e in inv['free_product_fingerprint']['entries']}
    lines.append(f"   {'target':<10}{'presentation':>14}{'free product':>14}")
    for entry in inv['fingerprint']['entries']:
        outcome = inv['comparison'].get(entry['target'])
        icon = {'match': '✅', 'mismatch': '❌'}.get(outcome, '⏳')
        count = entry['count'] if entry['count'] is not None else '-'
        lines.append(f"   {entry['target']:<10}{count!s:>14}{theirs.get(entry['target'])!s:>14}  {icon}")
    return lines


def render_report(report: Dict[str, Any]) -> str:
    """Human-readable summary of a pipeline report dictionary."""
    params = report['params']
    lines = [RULE,
             f"📐 F_{{{params['N']},{params['a']},{params['b']}}}: degree {report['curve']['degree']}, "
             f"m = {params['m']}, d = {params['d']}, catalog '{report['catalog']}'",
             RULE]

    build = report.get('build')
    if build:
        torus = build['torus']
        lines.append(f"🧩 Torus type ({torus['p']},{torus['q']}): f_p = {torus['f_p']}, f_q = {torus['f_q']} "
                     f"{_mark(build['torus_verified'])}")
    if 'audit' in report:
        lines += _render_audit(report['audit'])
    genus = report.get('genus')
    if genus:
        lines.append(f"📏 Genus check: delta {genus['delta_total']} vs {genus['arithmetic_genus_bound']} "
                     f"{_mark(genus['equality'])}")
    replay = report.get('replay')
    if replay:
        lines.append(f"🔁 Surface replay: {replay['blowups']} blow-ups, {replay['blowdowns']} blow-downs; "
                     f"E^2 = {replay['E.E']}, C^2 = {replay['C.C']}, C.E = {replay['C.E']}")
    monodromy = report.get('monodromy')
    if monodromy:
        lines.append(f"🪢 Monodromy: beta = {monodromy['braids']['beta']} "
                     f"(central relation {_mark(monodromy['central_relation'])})")
        if 'self_check' in monodromy:
            lines.append(f"   braid self-check {_mark(monodromy['self_check']['passed'])}")
    simplify = report.get('simplify')
    if simplify:
        pres = simplify['presentation']
        lines.append(f"📜 Presentation after {simplify['passes']} Tietze passes: {pres['text']}")
    if 'invariants' in report:
        lines += _render_invariants(report['invariants'])
    epi = report.get('epimorphism')
    if epi:
        if epi['found']:
            lines.append(f"🎯 Epimorphism onto Z/{params['d']} * Z/{params['N']}: {epi['images']}")
        else:
            lines.append(f"🎯 No epimorphism found within {epi['tried']} candidates")
    orbifold = report.get('orbifold')
    if orbifold:
        lines.append(f"🌐 Pencil base orbifold: {orbifold['presentation']}")
        if orbifold['note']:
            lines.append(f"   💡 {orbifold['note']}")

    for error in report['errors']:
        lines.append(f"❌ {error['stage']}: {error['error_type']}: {error['message']}")
    if report['skipped']:
        lines.append(f"⏭️  Skipped: {', '.join(report['skipped'])}")

    lines.append(RULE)
    lines.append(f"{VERDICT_ICONS.get(report['verdict'], '?')} Verdict: {report['verdict']}")
    for reason in report['reasons']:
        lines.append(f"   - {reason}")
    if report['strict_failures']:
        lines.append(f"⚠️  Strict-mode failures: {', '.join(report['strict_failures'])}")
    if 'timings' in report:
        lines.append("⏱️  " + ", ".join(f"{k} {v:.2f}s" for k, v in report['timings'].items()))
    return "\n".join(lines)
