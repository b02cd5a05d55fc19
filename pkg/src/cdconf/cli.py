"""JSON command surface: `cdconf <command> [--json FILE|-] [--seed N] [--tol X]`.

Commands map onto the library modules one to one; stdout carries exactly
one JSON document, human-readable logging goes to stderr.  Exit codes:
0 success, 1 domain/precondition failure (structured error object on
stdout), 2 malformed request (JSON diagnostic on stdout).

All randomized behavior (sampled verifier inputs, suites) derives from
the --seed argument through numpy's PCG64 generator, so identical
(command, payload, seed) invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import algebra, phrase as ph
from .algebra import CdNumber, cd
from .calculus import (
    RealJacobian,
    factor_octonion_givens,
    factor_quaternion,
    is_pseudoconformal_at,
    jacobian,
    split_dz,
)
from .contour import (
    PlanarLoop,
    PlanarPath,
    PlaneRect,
    count_zeros,
    disc_samples,
    line_integral,
    locate_zeros,
    max_principle_check,
    rouche_equal,
    winding,
)
from .domains import (
    BallAutomorphism,
    HomogeneousNorm,
    PolydiscAutomorphism,
    ball_apply,
    ball_to_halfspace,
    cartan_check,
    cayley_to_ball,
    polydisc_apply,
    schwarz_check,
)
from .errors import CdconfError, SchemaError
from .moebius import (
    INF,
    Hypersphere,
    MoebiusWord,
    apply_word,
    compose,
    inverse,
    map_hypersphere,
    reflect_conjugate,
    schwarz_extend,
    symmetric_point,
)
from .normal import AffineMap, CompactGrid, classify_sequence, rho
from .suites import list_suites, run_suite

__all__ = ["run", "main"]


def _need(payload, key, kind=None):
    if key not in payload:
        raise SchemaError(f"missing field {key!r}")
    val = payload[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"field {key!r} has wrong type {type(val).__name__}")
    return val


def _num(payload, key, default=None):
    if key not in payload:
        if default is None:
            raise SchemaError(f"missing numeric field {key!r}")
        return default
    val = payload[key]
    if not isinstance(val, (int, float)):
        raise SchemaError(f"field {key!r} must be a number")
    return float(val)


def _cd(payload, key) -> CdNumber:
    val = _need(payload, key, list)
    try:
        return cd(val)
    except CdconfError as exc:
        raise SchemaError(f"field {key!r}: {exc}") from exc


def _point_or_inf(value):
    if value is INF:
        return "inf"
    return value.to_json()


def _map_spec(payload, key="map"):
    """Callable from a map description: a generator word or a phrase."""
    spec = _need(payload, key, dict)
    kind = _need(spec, "kind", str)
    if kind == "moebius":
        word = MoebiusWord.from_json(_need(spec, "word", list), spec.get("level"))
        return lambda z: apply_word(word, z)
    if kind == "phrase":
        expr = ph.parse(_need(spec, "text", str))
        return lambda z: ph.eval_phrase(expr, z)
    raise SchemaError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_eval(payload, rng, tol):
    op = _need(payload, "op", str)
    if op == "mul":
        return {"result": algebra.mul(_cd(payload, "x"), _cd(payload, "y")).to_json()}
    if op == "conj":
        return {"result": algebra.conj(_cd(payload, "x")).to_json()}
    if op == "re":
        return {"result": algebra.re(_cd(payload, "x"))}
    if op == "norm":
        return {"result": algebra.norm(_cd(payload, "x"))}
    if op == "inv":
        return {"result": algebra.inv(_cd(payload, "x")).to_json()}
    if op == "proj":
        j = _need(payload, "j", int)
        return {"result": algebra.proj(j, _cd(payload, "x"))}
    if op == "exp":
        return {"result": algebra.exp(_cd(payload, "x")).to_json()}
    if op == "ln":
        branch = int(payload.get("branch", 0))
        return {"result": algebra.ln_branch(_cd(payload, "x"), branch).to_json()}
    if op == "pow":
        alpha = _num(payload, "alpha")
        branch = int(payload.get("branch", 0))
        return {"result": algebra.pow_real(_cd(payload, "x"), alpha, branch).to_json()}
    if op == "polar":
        p = algebra.polar(_cd(payload, "x"))
        return {"modulus": p.modulus, "arg": p.arg.to_json()}
    raise SchemaError(f"unknown eval op {op!r}")


def _cmd_check_pc(payload, rng, tol):
    f = _map_spec(payload)
    z = _cd(payload, "z")
    step = _num(payload, "step", 1e-5)
    jac = jacobian(f, z, step)
    verdict = is_pseudoconformal_at(jac, z, tol or 1e-6)
    dec = split_dz(jac)
    out = verdict.to_json()
    out["dzbar_norm"] = float(np.linalg.norm(dec.dzbar_part.entries, 2))
    return out


def _cmd_factor(payload, rng, tol):
    if "matrix" in payload:
        level = _need(payload, "level", int)
        jac = RealJacobian(level, np.asarray(_need(payload, "matrix", list), float))
    else:
        f = _map_spec(payload)
        z = _cd(payload, "z")
        jac = jacobian(f, z, _num(payload, "step", 1e-5))
        level = jac.level
    if level == 2:
        fac = factor_quaternion(jac, tol or 1e-6)
        return {"lambda": fac.lam, "a": fac.a.to_json(), "b": fac.b.to_json()}
    fac = factor_octonion_givens(jac, tol or 1e-6)
    return {"lambda": fac.lam, "angles": [[k, m, t] for k, m, t in fac.angles]}


def _cmd_phrase(payload, rng, tol):
    op = _need(payload, "op", str)
    text = _need(payload, "text", str)
    expr = ph.parse(text, strict=bool(payload.get("strict", False)))
    if op == "parse":
        return {"canonical": expr.render(), "words": len(expr.words),
                "max_degree": expr.max_degree()}
    if op == "length":
        return {"lengths": [ph.word_length(w) for w in expr.words]}
    if op == "distance":
        other = ph.parse(_need(payload, "other", str))
        params = ph.PhraseMetricParams(_num(payload, "b", 0.5))
        return {"distance": ph.phrase_distance(expr, other, params)}
    if op == "eval":
        z = _cd(payload, "z")
        h = cd(payload["h"]) if "h" in payload else None
        return {"result": ph.eval_phrase(expr, z, h).to_json()}
    if op == "derive":
        return {"result": ph.derivative_at_one(expr, int(payload.get("var", 1))).render()}
    if op == "antiderive":
        side = payload.get("side", "left")
        return {"result": ph.antiderive(expr, side, int(payload.get("var", 1))).render()}
    if op == "hat":
        return {"result": ph.hat_operator(expr, int(payload.get("var", 1))).render()}
    raise SchemaError(f"unknown phrase op {op!r}")


def _sphere(payload, key="sphere") -> Hypersphere:
    return Hypersphere.from_json(_need(payload, key, dict))


def _cmd_moebius(payload, rng, tol):
    op = _need(payload, "op", str)
    if op in ("apply", "inverse-apply"):
        word = MoebiusWord.from_json(_need(payload, "word", list), payload.get("level"))
        if op == "inverse-apply":
            word = inverse(word)
        zraw = _need(payload, "z")
        z = INF if zraw == "inf" else cd(zraw)
        return {"result": _point_or_inf(apply_word(word, z))}
    if op == "compose":
        w1 = MoebiusWord.from_json(_need(payload, "word", list), payload.get("level"))
        w2 = MoebiusWord.from_json(_need(payload, "word2", list), payload.get("level"))
        return {"word": compose(w1, w2).to_json()}
    if op == "inverse":
        word = MoebiusWord.from_json(_need(payload, "word", list), payload.get("level"))
        return {"word": inverse(word).to_json()}
    if op == "map-sphere":
        word = MoebiusWord.from_json(_need(payload, "word", list), payload.get("level"))
        return {"sphere": map_hypersphere(word, _sphere(payload)).to_json()}
    if op == "symmetric":
        return {"result": _point_or_inf(symmetric_point(_cd(payload, "z"), _sphere(payload)))}
    if op == "reflect":
        return {"result": reflect_conjugate(_cd(payload, "z")).to_json()}
    if op == "schwarz-extend":
        word = MoebiusWord.from_json(_need(payload, "word", list), payload.get("level"))
        f = lambda z: apply_word(word, z)
        return {"result": schwarz_extend(f, _cd(payload, "z")).to_json()}
    raise SchemaError(f"unknown moebius op {op!r}")


def _ball_from(payload) -> BallAutomorphism:
    araw = _need(payload, "a", list)
    coords = araw if araw and isinstance(araw[0], list) else [araw]
    frame = None
    if "frame" in payload:
        frame = [(cd(l), cd(r)) for l, r in _need(payload, "frame", list)]
    return BallAutomorphism(tuple(cd(c) for c in coords), frame)


def _ball_samples(rng, level, count, scale=0.4):
    out = []
    while len(out) < count:
        v = cd(rng.normal(size=1 << level) * scale)
        if v.norm() < 0.95:
            out.append(v)
    return out


def _cmd_domain(payload, rng, tol):
    op = _need(payload, "op", str)
    if op == "ball":
        phi = _ball_from(payload)
        zraw = _need(payload, "z", list)
        coords = zraw if zraw and isinstance(zraw[0], list) else [zraw]
        out = ball_apply(phi, tuple(cd(c) for c in coords))
        return {"result": [w.to_json() for w in out]}
    if op == "polydisc":
        braw = _need(payload, "b", list)
        bs = braw if braw and isinstance(braw[0], list) else [braw]
        mult = [tuple(cd(c) for c in row) for row in _need(payload, "multipliers", list)]
        psi = PolydiscAutomorphism(tuple(cd(c) for c in bs), tuple(mult),
                                   payload.get("sigma"))
        zraw = _need(payload, "z", list)
        coords = zraw if zraw and isinstance(zraw[0], list) else [zraw]
        out = polydisc_apply(psi, tuple(cd(c) for c in coords))
        return {"result": [w.to_json() for w in out]}
    if op == "cayley":
        return {"result": _point_or_inf(cayley_to_ball(_cd(payload, "z"), _cd(payload, "M")))}
    if op == "uncayley":
        return {"result": _point_or_inf(ball_to_halfspace(_cd(payload, "w"), _cd(payload, "M")))}
    if op == "schwarz":
        spec = _need(payload, "map", dict)
        kind = _need(spec, "kind", str)
        if kind == "frame":
            u, v = cd(_need(spec, "u", list)), cd(_need(spec, "v", list))
            f = lambda z: algebra.mul(algebra.mul(u, z), v)
            level = u.level
        elif kind == "ball-squared":
            phi = BallAutomorphism((cd(_need(spec, "a", list)),))
            f = lambda z: ball_apply(phi, ball_apply(phi, z))
            level = phi.a[0].level
        else:
            raise SchemaError(f"unknown schwarz map kind {kind!r}")
        samples = _ball_samples(rng, level, int(payload.get("samples", 100)))
        res = schwarz_check(f, HomogeneousNorm(payload.get("norm_in", "euclidean")),
                            HomogeneousNorm(payload.get("norm_out", "euclidean")),
                            samples, tol or 1e-9)
        return {"holds": res.holds, "worst_ratio": res.worst_ratio}
    if op == "cartan":
        spec = _need(payload, "map", dict)
        if _need(spec, "kind", str) != "ball-squared":
            raise SchemaError("cartan map kind must be 'ball-squared'")
        phi = BallAutomorphism((cd(_need(spec, "a", list)),))
        f = lambda z: ball_apply(phi, ball_apply(phi, z))
        level = phi.a[0].level
        samples = _ball_samples(rng, level, int(payload.get("samples", 100)))
        res = cartan_check(f, CdNumber.zero(level), samples, tol or 1e-8)
        return {"is_identity": res.is_identity, "max_deviation": res.max_deviation}
    raise SchemaError(f"unknown domain op {op!r}")


def _loop(payload, key="loop") -> PlanarLoop:
    return PlanarLoop.from_json(_need(payload, key, dict))


def _cmd_contour(payload, rng, tol):
    op = _need(payload, "op", str)
    if op == "integral":
        expr = ph.parse(_need(payload, "phrase", str))
        raw = _need(payload, "path", dict)
        path = PlanarPath.from_json(raw)
        if path.closed and len(path.pts) >= 17:
            path = PlanarLoop.from_json(raw)
        val = line_integral(expr, path, _num(payload, "refine", 1e-10),
                            payload.get("side", "left"))
        return {"result": val.to_json()}
    if op == "winding":
        res = winding(_loop(payload), _cd(payload, "a"))
        return {"turns": res.turns, "raw_phase": res.raw_phase, "M": res.m.to_json()}
    if op == "zeros":
        return {"count": count_zeros(_map_spec(payload), _loop(payload),
                                     _num(payload, "boundary_tol", 1e-9))}
    if op == "rouche":
        res = rouche_equal(_map_spec(payload, "f"), _map_spec(payload, "g"),
                           _loop(payload))
        return {"holds": res.holds, "n_g": res.n_g, "n_h": res.n_h}
    if op == "maxmod":
        loop = _loop(payload)
        disc = _need(payload, "disc", dict)
        center = tuple(_need(disc, "center", list))
        samples = disc_samples(center, _num(disc, "radius"),
                               int(payload.get("samples", 500)), rng,
                               a0=loop.a0, m=loop.m)
        res = max_principle_check(_map_spec(payload), loop, samples, tol or 1e-9)
        return {"holds": res.holds, "sup_interior": res.sup_interior,
                "sup_boundary": res.sup_boundary}
    if op == "locate":
        spec = _need(payload, "rect", dict)
        rect = PlaneRect(cd(_need(spec, "a0", list)), cd(_need(spec, "M", list)),
                         _num(spec, "x0"), _num(spec, "x1"),
                         _num(spec, "y0"), _num(spec, "y1"))
        found = locate_zeros(_map_spec(payload), rect, _num(payload, "min_cell"),
                             _num(payload, "boundary_tol", 1e-9))
        return {"zeros": [{"center": z.to_json(), "order": k} for z, k in found]}
    raise SchemaError(f"unknown contour op {op!r}")


def _affine_maps(payload):
    maps = []
    for row in _need(payload, "maps", list):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError("each map is an [a, b, c] coefficient triple")
        maps.append(AffineMap(cd(row[0]), cd(row[1]), cd(row[2])))
    return maps


def _cmd_normal(payload, rng, tol):
    op = _need(payload, "op", str)
    grid = CompactGrid.from_json(_need(payload, "grid", dict))
    if op == "rho":
        maps = _affine_maps(payload)
        if len(maps) != 2:
            raise SchemaError("rho compares exactly two maps")
        val = rho(maps[0], maps[1], grid)
        return {"rho": val.value, "resolution": val.resolution}
    if op == "classify":
        res = classify_sequence(_affine_maps(payload), grid, tol or 1e-3)
        return res.to_json()
    raise SchemaError(f"unknown normal op {op!r}")


def _cmd_suite(payload, rng, tol, seed):
    name = _need(payload, "name", str)
    try:
        report = run_suite(name, seed)
    except KeyError as exc:
        raise SchemaError(str(exc)) from exc
    return report.to_json()


def _cmd_list_suites(payload, rng, tol):
    suites = list_suites()
    return {"suites": suites, "count": len(suites)}


_COMMANDS = {
    "eval": _cmd_eval,
    "check-pc": _cmd_check_pc,
    "factor": _cmd_factor,
    "phrase": _cmd_phrase,
    "moebius": _cmd_moebius,
    "domain": _cmd_domain,
    "contour": _cmd_contour,
    "normal": _cmd_normal,
    "list-suites": _cmd_list_suites,
}


def run(request: dict) -> dict:
    """Execute one command request {command, payload, seed?, tol?}."""
    if not isinstance(request, dict):
        raise SchemaError("request must be a JSON object")
    command = _need(request, "command", str)
    payload = request.get("payload", {})
    if not isinstance(payload, dict):
        raise SchemaError("payload must be a JSON object")
    seed = request.get("seed", 0)
    if not isinstance(seed, int):
        raise SchemaError("seed must be an integer")
    tol = request.get("tol")
    if tol is not None and not isinstance(tol, (int, float)):
        raise SchemaError("tol must be a number")
    rng = np.random.default_rng(seed)
    if command == "suite":
        return _cmd_suite(payload, rng, tol, seed)
    handler = _COMMANDS.get(command)
    if handler is None:
        raise SchemaError(f"unknown command {command!r}")
    return handler(payload, rng, tol)


def _emit(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cdconf",
        description="hypercomplex pseudoconformal analysis over JSON",
    )
    parser.add_argument("command", help="one of: " + ", ".join([*_COMMANDS, "suite"]))
    parser.add_argument("--json", default=None,
                        help="payload file, or '-' for stdin (default: empty payload)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=None)
    args = parser.parse_args(argv)

    try:
        payload = {}
        if args.json == "-":
            text = sys.stdin.read()
            payload = json.loads(text) if text.strip() else {}
        elif args.json:
            with open(args.json, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
    except (json.JSONDecodeError, OSError) as exc:
        print(_emit({"error": {"type": "schema", "message": f"bad payload: {exc}"}}))
        print(f"error: {exc}", file=sys.stderr)
        return 2

    request = {"command": args.command, "payload": payload, "seed": args.seed}
    if args.tol is not None:
        request["tol"] = args.tol
    try:
        result = run(request)
    except SchemaError as exc:
        print(_emit({"error": {"type": "schema", "message": str(exc)}}))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CdconfError as exc:
        print(_emit({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_emit(result))
    if args.command == "suite":
        for case in result.get("cases", []):
            status = "pass" if case["passed"] else "FAIL"
            print(f"{status}  {case['case']}: worst {case['worst']:.3e} "
                  f"(tol {case['tolerance']:.1e})", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
