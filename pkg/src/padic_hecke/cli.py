"""Command-line runs of every pipeline from a declarative config.

A config is a JSON text file with explicit generators; see
``configs/default.json`` inside the package.  Every run writes one JSON
report to ``--out`` and exits 0 iff all requested checks passed, 1 if a
check failed and 2 on an invalid config.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources

import mpmath

from . import __version__
from .cyclotomic import Cyclo
from .eisenstein import (LatticeC, brute_force_sum, eisenstein_series, full_L, ideal_sum_oracle,
                         partial_L, period_omega, ray_classes_for)
from .fourier import (CharacterPoint, TorsionFunction, convolve, finite_fourier, inner,
                      inverse_finite_fourier, is_W_analytic, pointwise)
from .hecke_field import (CLASS_NUMBER_ONE, IdealRep, ImagQuadField, InvalidCharacter, euler_factor,
                          factor_over, is_split, local_factor, make_character,
                          norm_character_point, sigma_character_point, sigma_condition)
from .interpolation import c_independence, congruence_check, refinement_check, verify_theorem_A
from .padic_core import PadicNumber

SCHEMA = "padic-hecke-report/1"
CONFIG_SCHEMA = 1


class ConfigError(ValueError):
    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule
        self.message = message


@dataclass
class CharacterSpec:
    alpha: int
    finite: list = field(default_factory=list)  # [[a, b], order, exponent]

    def build(self, F: ImagQuadField):
        return make_character(F, self.alpha, [(tuple(g), o, e) for g, o, e in self.finite])


@dataclass
class RunConfig:
    discriminant: int
    prime: int
    f: tuple
    c: tuple
    characters: list
    c_alt: tuple | None = None
    padic_precision: int = 20
    complex_bits: int = 100
    radius_policy: str = "ewald"
    level: int | None = None
    tol: float = 1e-6
    experimental_low_weight: bool = False
    options: dict = field(default_factory=dict)

    @property
    def dps(self) -> int:
        return max(15, int(self.complex_bits * math.log10(2)))

    @property
    def field(self) -> ImagQuadField:
        return ImagQuadField(self.discriminant)

    def ideal(self, gen) -> IdealRep:
        return IdealRep.of(self.field, *gen)

    def to_json(self) -> dict:
        d = asdict(self)
        d["characters"] = [asdict(c) for c in self.characters]
        return d


def _pair(x, name):
    if not (isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) for v in x)):
        raise ConfigError("explicit-generators", f"{name} must be a pair [a, b] of integers for a + b w")
    if x == [0, 0]:
        raise ConfigError("nonzero-ideals", f"{name} generates the zero ideal")
    return tuple(x)


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("syntax", str(e)) from None
    if raw.get("schema_version") != CONFIG_SCHEMA:
        raise ConfigError("schema-version", f"expected schema_version {CONFIG_SCHEMA}")
    for key in ("discriminant", "prime", "f", "c", "characters"):
        if key not in raw:
            raise ConfigError("explicit-generators", f"missing required field '{key}'")
    prec = raw.get("precision", {})
    chars = []
    for ch in raw["characters"]:
        finite = [[list(_pair(x["prime"], "finite prime")), int(x["order"]), int(x["exponent"])]
                  for x in ch.get("finite", [])]
        chars.append(CharacterSpec(int(ch["alpha"]), finite))
    return RunConfig(
        discriminant=int(raw["discriminant"]), prime=int(raw["prime"]),
        f=_pair(raw["f"], "f"), c=_pair(raw["c"], "c"),
        c_alt=_pair(raw["c_alt"], "c_alt") if raw.get("c_alt") else None,
        characters=chars,
        padic_precision=int(prec.get("padic", 20)), complex_bits=int(prec.get("complex_bits", 100)),
        radius_policy=str(prec.get("radius_policy", "ewald")),
        level=raw.get("level"), tol=float(raw.get("tol", 1e-6)),
        experimental_low_weight=bool(raw.get("experimental_low_weight", False)),
        options=raw.get("options", {}),
    )


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % k for k in range(2, math.isqrt(n) + 1))


def validate(cfg: RunConfig) -> None:
    """Every structural rule, checked before any computation."""
    if cfg.discriminant not in CLASS_NUMBER_ONE:
        raise ConfigError("class-number-one", f"discriminant {cfg.discriminant} is not one of {CLASS_NUMBER_ONE}")
    if not _is_prime(cfg.prime):
        raise ConfigError("prime", f"p = {cfg.prime} is not prime")
    if cfg.discriminant % cfg.prime == 0:
        raise ConfigError("unramified-p", f"p = {cfg.prime} ramifies in the field")
    if cfg.radius_policy != "ewald":
        raise ConfigError("radius-policy", "only the 'ewald' summation radius policy is available")
    F = cfg.field
    f, c = cfg.ideal(cfg.f), cfg.ideal(cfg.c)
    above_p = factor_over(F, cfg.prime)
    cs = [("c", c)] + ([("c_alt", cfg.ideal(cfg.c_alt))] if cfg.c_alt else [])
    for name, C in cs:
        if any(C.valuation(q) for q in above_p):
            raise ConfigError("coprime(c, p)", f"{name} = {C.generator} is not prime to p = {cfg.prime}")
        if not C.is_coprime(f):
            raise ConfigError("coprime(c, f)", f"{name} = {C.generator} is not prime to f = {f.generator}")
    if any(f.valuation(q) for q in above_p):
        raise ConfigError("coprime(f, p)", f"f = {f.generator} is not prime to p = {cfg.prime}")
    if not cfg.characters:
        raise ConfigError("characters", "at least one character is required")
    for spec in cfg.characters:
        if spec.alpha < 1:
            raise ConfigError("infinity-type", "alpha must be at least 1")
        if spec.alpha < 3 and not cfg.experimental_low_weight:
            raise ConfigError("low-weight", f"alpha = {spec.alpha} needs --experimental-low-weight")
        try:
            chi = spec.build(F)
        except InvalidCharacter as e:
            raise ConfigError("well-defined-character", str(e)) from None
        for q in chi.conductor_primes():
            if q.p != cfg.prime and f.valuation(q) == 0:
                raise ConfigError("conductor-divides-p-f",
                                  f"conductor prime {q.generator} divides neither p nor f")
            for name, C in cs:
                if C.valuation(q):
                    raise ConfigError("coprime(c, conductor)",
                                      f"{name} = {C.generator} meets the conductor prime {q.generator}")
    if cfg.padic_precision < 2:
        raise ConfigError("precision", "p-adic precision must be at least 2")
    if cfg.complex_bits < 53:
        raise ConfigError("precision", "complex precision must be at least 53 bits")


def default_config_text() -> str:
    return resources.files("padic_hecke").joinpath("configs/default.json").read_text()


# reports ----------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (Fraction, Cyclo, PadicNumber)) or hasattr(x, "generator"):
        return str(x)
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(x, 20)
    return x


def write_report(out_dir: str, name: str, report: dict) -> str:
    """Write atomically: temp file in the target directory, then rename."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.json")
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _envelope(cmd: str, cfg: RunConfig, results, passed: bool) -> dict:
    return {"schema": SCHEMA, "version": __version__, "subcommand": cmd,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": cfg.to_json(), "results": results, "passed": bool(passed)}


# subcommands -------------------------------------------------------------------


def run_fourier(cfg: RunConfig):
    opt = cfg.options.get("fourier", {})
    p, rank, n = opt.get("prime", cfg.prime), opt.get("rank", 2), opt.get("level", 1)
    cases, rng = opt.get("cases", 50), random.Random(opt.get("seed", 0))
    M, size = p ** n, p ** (n * rank)
    failures = []
    for i in range(cases):
        fs = []
        for _ in range(2):
            vals = {tuple(rng.randrange(M) for _ in range(rank)):
                    Cyclo.root(M, rng.randrange(M)) * rng.randint(-3, 3) for _ in range(3)}
            fs.append(TorsionFunction.on_level(p, n, rank, vals))
        f, g = fs
        F, G = finite_fourier(f), finite_fourier(g)
        ok = {"inversion": inverse_finite_fourier(F) == f,
              "parseval": inner(f, f) == inner(F, F) * size,
              "convolution": finite_fourier(convolve(f, g)) == pointwise(F, G).scale(size)}
        if not all(ok.values()):
            failures.append({"case": i, **ok})
    r = tuple([1] + [0] * (rank - 1))
    d1 = TorsionFunction.delta(M, r, "O", p)
    shift = TorsionFunction.delta(M, tuple((x + y) % M for x, y in zip(r, r)), "O", p)
    demo = convolve(TorsionFunction.delta(M, r, "O", p), d1) == shift
    res = {"prime": p, "rank": rank, "level": n, "cases": cases, "failures": failures,
           "delta_convolution": demo}
    return res, not failures and demo


def run_charvar(cfg: RunConfig):
    F, p, N = cfg.field, cfg.prime, cfg.padic_precision
    W = sigma_condition(F, p, N)
    f = W.rows[0][0].ext_degree
    one = PadicNumber.from_int(p, 1, N, f)
    generic = one + PadicNumber.from_coeffs(p, [3 * p + p * p] + [p] * (f - 1), N, f)
    points = [("trivial", CharacterPoint.single((1, 0), one), True)]
    for spec in cfg.characters:
        points.append((f"avatar alpha={spec.alpha}", sigma_character_point(F, p, spec.alpha, N), True))
    points.append(("inverse norm", norm_character_point(F, generic), False))
    rows, ok = [], True
    for name, chi, want in points:
        got = is_W_analytic(chi, W)
        rows.append({"character": name, "sigma_analytic": got, "expected": want})
        ok = ok and got == want
    return {"prime": p, "split": is_split(F, p), "residue_degree": f, "rows": rows}, ok


def run_eisenstein(cfg: RunConfig):
    opt = cfg.options.get("eisenstein", {})
    F = cfg.field
    alpha, s = int(opt.get("alpha", cfg.characters[0].alpha)), opt.get("s", 0)
    lat = LatticeC(F, F.elt(*opt.get("lattice", [1, 0])))
    modulus = int(opt.get("modulus", 1))
    pts = opt.get("points", [{"point": [0, 0], "value": 1}])
    f = TorsionFunction(modulus, 2, {tuple(x["point"]): Fraction(x["value"]) for x in pts}, lat.label)
    with mpmath.workdps(cfg.dps):
        E = eisenstein_series(f, alpha, s, lat, None, cfg.dps, cfg.experimental_low_weight)
        res = {"alpha": alpha, "s": str(s), "lattice": lat.label, "value": E.to_json()}
        ok = True
        radius = opt.get("oracle_radius")
        if radius and alpha >= 3:
            total = None
            for t, v in f.values.items():
                b = brute_force_sum(lat, (Fraction(t[0], modulus), Fraction(t[1], modulus)),
                                    alpha, alpha + mpmath.mpmathify(s), radius).scale(v.to_complex())
                total = b if total is None else total + b
            gap = abs(E.value - total.value)
            ok = bool(gap <= E.abs_error + total.abs_error)
            res["oracle"] = {"radius": radius, "value": total.to_json(), "gap": mpmath.nstr(gap, 3),
                             "agrees": ok}
    return res, ok


def run_lvalue(cfg: RunConfig):
    opt = cfg.options.get("lvalue", {})
    F, f = cfg.field, cfg.ideal(cfg.f)
    rows, ok = [], True
    with mpmath.workdps(cfg.dps):
        for spec in cfg.characters:
            chi = spec.build(F)
            for s in opt.get("s", [0]):
                partials = []
                for b in ray_classes_for(chi, f).representatives:
                    v = partial_L(chi, s, b, f, cfg.dps, cfg.experimental_low_weight)
                    partials.append({"class": str(b), **v.to_json()})
                total = full_L(chi, s, f, cfg.dps, cfg.experimental_low_weight)
                row = {"alpha": spec.alpha, "finite": spec.finite, "s": s, "partials": partials,
                       "L_f": total.to_json()}
                X = opt.get("oracle_max_norm")
                if X and s >= 2:
                    O = ideal_sum_oracle(chi, s, f, X)
                    gap = abs(O.value - total.value)
                    good = bool(gap <= O.abs_error + total.abs_error)
                    row["oracle"] = {"max_norm": X, **O.to_json(), "gap": mpmath.nstr(gap, 3), "agrees": good}
                    ok = ok and good
                rows.append(row)
    return {"rows": rows}, ok


def run_local_factor(cfg: RunConfig):
    F, f, p = cfg.field, cfg.ideal(cfg.f), cfg.prime
    rows, ok = [], True
    with mpmath.workdps(cfg.dps):
        for spec in cfg.characters:
            chi = spec.build(F)
            a = local_factor(chi, p, f, 0)
            b = local_factor(chi, p, f, 1) if chi.nontrivial_components else a
            same = abs(a.to_complex() - b.to_complex()) <= mpmath.mpf(10) ** (-cfg.dps + 5)
            ok = ok and bool(same)
            rows.append({"alpha": spec.alpha, "finite": spec.finite,
                         "local": mpmath.nstr(a.to_complex(), 20), "c": str(a.c), "n": str(a.n_generator),
                         "second_decomposition": {"c": str(b.c), "n": str(b.n_generator)},
                         "independent_of_decomposition": bool(same),
                         "euler": mpmath.nstr(euler_factor(chi, p), 20)})
    return {"prime": p, "rows": rows}, ok


def run_verify(cfg: RunConfig):
    F, f, p = cfg.field, cfg.ideal(cfg.f), cfg.prime
    c = F.elt(*cfg.c)
    rows, ok = [], True
    for spec in cfg.characters:
        chi = spec.build(F)
        rep = verify_theorem_A(chi, p, f, c, cfg.tol, cfg.dps, cfg.level, cfg.experimental_low_weight)
        row = {"report": rep.to_json()}
        ok = ok and rep.passed
        if cfg.c_alt:
            _, _, d = c_independence(chi, p, f, c, F.elt(*cfg.c_alt), cfg.dps, cfg.level)
            row["c_independence"] = {"c_alt": str(F.elt(*cfg.c_alt)), "discrepancy": d,
                                     "passed": bool(d < cfg.tol)}
            ok = ok and d < cfg.tol
        rows.append(row)
    return {"prime": p, "rows": rows}, ok


def run_congruence(cfg: RunConfig):
    opt = cfg.options.get("congruence", {})
    F, f, p = cfg.field, cfg.ideal(cfg.f), cfg.prime
    alpha = int(opt.get("alpha", cfg.characters[0].alpha))
    k = int(opt.get("k", 1))
    alpha2 = int(opt.get("alpha2", alpha + (p - 1) * p ** (k - 1)))
    cs = [F.elt(*cfg.c)] + ([F.elt(*cfg.c_alt)] if cfg.c_alt else [])
    levels = opt.get("refinement_levels", [0])
    ref = [refinement_check(F, alpha, p, f, cs[0], n, 0, cfg.dps) | {"n": n} for n in levels]
    ok = all(r["exact_fourier"] and r["max_relative_gap"] < 1e-9 for r in ref)
    res = {"prime": p, "refinement": ref}
    if is_split(F, p):
        cong = congruence_check(F, alpha, alpha2, p, f, cs, k, max(cfg.dps, 100))
        res["congruence"] = cong
        ok = ok and cong["passed"]
    else:
        res["congruence"] = "not asserted: p is inert, so the distribution is not bounded"
    return res, ok


def run_selftest(cfg: RunConfig):
    from .acceptance import run_all
    results = run_all(echo=lambda line: print(line, file=sys.stderr))
    rows = []
    for r in results:
        d = r.to_json()
        d.pop("seconds")
        rows.append(d)
    return {"criteria": rows}, all(r.passed for r in results)


COMMANDS = {
    "fourier": (run_fourier, "finite Fourier transform and convolution checks"),
    "charvar": (run_charvar, "Sigma-analyticity of declared character points"),
    "eisenstein": (run_eisenstein, "a single Eisenstein series value"),
    "lvalue": (run_lvalue, "partial and full L-values"),
    "local-factor": (run_local_factor, "local and Euler factors at p"),
    "verify-interpolation": (run_verify, "both sides of the interpolation identity"),
    "congruence": (run_congruence, "measure refinement and Kummer congruence"),
    "selftest": (run_selftest, "the full acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run config (default: the shipped config)")
    common.add_argument("--precision-padic", type=int, metavar="N", help="p-adic digits")
    common.add_argument("--precision-bits", type=int, metavar="B", help="complex working precision in bits")
    common.add_argument("--tol", type=float, metavar="T", help="relative tolerance for identities")
    common.add_argument("--out", default="reports", metavar="DIR", help="report directory")
    common.add_argument("--experimental-low-weight", action="store_true",
                        help="allow alpha in {1, 2} through the analytic continuation")
    parser = argparse.ArgumentParser(prog="padic-hecke", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def load_config(args) -> RunConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError("config-file", str(e)) from None
    else:
        text = default_config_text()
    cfg = parse_config(text)
    if args.precision_padic is not None:
        cfg.padic_precision = args.precision_padic
    if args.precision_bits is not None:
        cfg.complex_bits = args.precision_bits
    if args.tol is not None:
        cfg.tol = args.tol
    if args.experimental_low_weight:
        cfg.experimental_low_weight = True
    validate(cfg)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except ConfigError as e:
        print(json.dumps({"error": "invalid config", "rule": e.rule, "message": e.message}), file=sys.stderr)
        return 2
    fn, _ = COMMANDS[args.command]
    results, passed = fn(cfg)
    path = write_report(args.out, args.command, _envelope(args.command, cfg, results, passed))
    print(f"{'PASS' if passed else 'FAIL'} {args.command}: {path}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
