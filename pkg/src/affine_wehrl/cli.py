"""affine-wehrl command line: verify | search | bergman | field.

Configuration is a flat ``key=value`` file (``#`` starts a comment) whose
keys are the RunConfig field names; command-line flags override it. Every
JSON record carries ``schemaVersion`` and the full resolved config.

Exit codes: 0 success, 1 invariant failure, 2 config or input error,
3 persistent counterexample candidate from ``search``.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np
from scipy import integrate

from . import basis
from .affine_core import AffineElement, apply_rep, inverse, normalized_fiducial
from .bergman import (
    BERGMAN_WINDOW,
    RationalExtremal,
    bergman_kgrid,
    husimi_relation_check,
    paley_wiener,
    sharp_constant_probe,
    weighted_norm,
    weighted_norms,
)
from .closed_forms import (
    TheoremBoundInputs,
    conjectured_max,
    dirichlet_integral,
    fiducial_renyi,
    fiducial_transform,
    maximizer_family,
    minimal_entropy,
    theorem_upper_bound,
)
from .cst_engine import HusimiField, set_nufft_threads, transform_at, transform_field
from .functionals import (
    entropy_from_renyi_derivative,
    renyi_functional,
    sup_bound_check,
    wehrl_entropy,
)
from .grids import GridError, KGrid, PhaseGridSpec, build_kgrid, build_phase_grid, kgrid_for
from .optimizer import default_kgrid, probe

log = logging.getLogger("affine_wehrl")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3

# acceptance tolerances used by verify and bergman
MASS_TOL = 1e-3
SUP_TOL = 1e-6
IDENTITY_TOL = 1e-12
DIRICHLET_TOL = 1e-9
RENYI_TOL = 1e-4
ENTROPY_TOL = 1e-3
COVARIANCE_TOL = 1e-8
UNITARITY_TOL = 1e-5
RELATION_TOL = 1e-7
INVARIANCE_TOL = 1e-7
SHARP_ERROR_TOL = 1e-6

CLOSED_FORM_ALPHAS = (0.25, 0.5, 1.0, 2.0, 3.7)
VERIFY_ALPHAS = (0.5, 1.0, 2.0)
N_RANDOM = 20
Z0_SET = (-1j, -2j, 1 - 1j, -0.5 - 3j)


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    if not parts:
        raise ConfigError("empty list")
    return tuple(float(p) for p in parts)


def _parse_opt_int(text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return int(text)


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.5
    sValues: tuple = (1.0, 1.5, 2.0, 3.0)
    n: int | None = None
    kMax: float = 90.0
    nA: int = 185
    nB: int = 241
    aMin: float = 1e-6
    aMax: float = 100.0
    bMax: float = 12.0
    dim: int = 6
    restarts: int = 8
    seed: int = 0
    outputDir: str = "results"
    emitFields: bool = False
    deterministic: bool = False
    workers: int = 1
    fSpec: str = "fiducial"

    def validate(self) -> "RunConfig":
        checks = [
            (self.alpha > 0, "alpha must be > 0"),
            (len(self.sValues) > 0 and all(s >= 1 for s in self.sValues), "sValues must be >= 1"),
            (self.n is None or self.n >= 16, "n must be >= 16"),
            (self.kMax > 0, "kMax must be > 0"),
            (self.nA >= 3 and self.nB >= 3, "nA and nB must be >= 3"),
            (0 < self.aMin < 1 < self.aMax, "need 0 < aMin < 1 < aMax"),
            (self.bMax > 0, "bMax must be > 0"),
            (1 <= self.dim <= 64, "dim must be in [1, 64]"),
            (self.restarts >= 1, "restarts must be >= 1"),
            (0 <= self.seed < 2**64, "seed must be a 64-bit unsigned integer"),
            (self.workers >= 1, "workers must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sValues"] = list(self.sValues)
        return d

    def phase_spec(self) -> PhaseGridSpec:
        return PhaseGridSpec(n_a=self.nA, n_b=self.nB, a_min=self.aMin, a_max=self.aMax, b_max=self.bMax)

    def kgrid(self) -> KGrid:
        return build_kgrid(kgrid_for(self.phase_spec(), n=self.n, k_max=self.kMax))


_PARSERS = {
    "alpha": float,
    "sValues": _parse_list,
    "n": _parse_opt_int,
    "kMax": float,
    "nA": int,
    "nB": int,
    "aMin": float,
    "aMax": float,
    "bMax": float,
    "dim": int,
    "restarts": int,
    "seed": int,
    "outputDir": str,
    "emitFields": _parse_bool,
    "deterministic": _parse_bool,
    "workers": int,
    "fSpec": str,
}


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then config-file values, then flag overrides."""
    raw = dict(file_values or {})
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    kw = {}
    for key, value in raw.items():
        try:
            kw[key] = _PARSERS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
    return replace(RunConfig(), **kw).validate()


def _record(cfg: RunConfig, command: str, **payload) -> dict:
    return {"schemaVersion": SCHEMA_VERSION, "command": command, "config": cfg.to_dict(), **payload}


def write_json(path: Path, obj: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def _check(name: str, passed: bool, value: float, tolerance: float, **extra) -> dict:
    return {"name": name, "passed": bool(passed), "value": float(value), "tolerance": tolerance, **extra}


def _rng(seed: int, stream: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, i)))


# verify

def _closed_form_checks() -> list[dict]:
    rel = lambda x, y: abs(x - y) / abs(y)
    worst_thm = max(
        rel(theorem_upper_bound(TheoremBoundInputs(s, a)), conjectured_max(s, a))
        for s in range(1, 7)
        for a in CLOSED_FORM_ALPHAS
    )
    worst_fid = max(
        rel(fiducial_renyi(s, a), conjectured_max(s, a))
        for s in np.arange(1.0, 4.0001, 0.25)
        for a in CLOSED_FORM_ALPHAS
    )
    worst_dir = 0.0
    for a in VERIFY_ALPHAS:
        q = 2 * a
        d2 = integrate.quad(lambda u: (u * (1 - u)) ** q, 0, 1, epsabs=0, epsrel=1e-13)[0]
        d3 = integrate.dblquad(
            lambda v, u: (u * v * (1 - u - v)) ** q, 0, 1, 0, lambda u: 1 - u, epsabs=0, epsrel=1e-12
        )[0]
        worst_dir = max(worst_dir, rel(dirichlet_integral(2, a), d2), rel(dirichlet_integral(3, a), d3))
    return [
        _check("closedForm.theoremBoundEqualsConjecture", worst_thm <= IDENTITY_TOL, worst_thm, IDENTITY_TOL),
        _check("closedForm.fiducialRenyiEqualsConjecture", worst_fid <= IDENTITY_TOL, worst_fid, IDENTITY_TOL),
        _check("closedForm.dirichletQuadratureOracle", worst_dir <= DIRICHLET_TOL, worst_dir, DIRICHLET_TOL),
    ]


def _isometry_checks(cfg: RunConfig, kg: KGrid, grid) -> tuple[list[dict], dict]:
    dim = max(cfg.dim, 8)
    masses, sups = [], []
    for i in range(N_RANDOM):
        f = basis.synthesize(basis.random_coefficients(_rng(cfg.seed, 1, i), dim), cfg.alpha, kg)
        field = transform_field(f, cfg.alpha, grid, check=False)
        masses.append(field.mass())
        sups.append(sup_bound_check(field)[0])
    defect = max(abs(m - 1.0) for m in masses)
    excess = max(sups) - cfg.alpha
    f0 = normalized_fiducial(cfg.alpha, kg)
    h0 = transform_at(f0, cfg.alpha, AffineElement(1.0, 0.0))
    sat = abs(abs(h0) ** 2 - cfg.alpha)
    # covariance: h_{U(g0) f}(g) = <U(g) eta, U(g0) f> = h_f(g0^{-1} g); pointwise,
    # so it runs on the default k-grid whatever the configured window
    f = basis.synthesize(basis.random_coefficients(_rng(cfg.seed, 2, 0), dim), cfg.alpha, default_kgrid())
    rng = _rng(cfg.seed, 3, 0)
    worst_cov = 0.0
    for _ in range(8):
        g0 = AffineElement(float(np.exp(rng.uniform(-0.7, 0.7))), float(rng.uniform(-0.5, 0.5)))
        g = AffineElement(float(np.exp(rng.uniform(-1.0, 1.0))), float(rng.uniform(-1.0, 1.0)))
        lhs = abs(transform_at(apply_rep(g0, f), cfg.alpha, g))
        rhs = abs(transform_at(f, cfg.alpha, inverse(g0) @ g))
        worst_cov = max(worst_cov, abs(lhs - rhs))
    checks = [
        _check(
            "isometry.randomMass",
            defect <= MASS_TOL,
            defect,
            MASS_TOL,
            diagnostic=(
                None
                if defect <= MASS_TOL
                else f"isometry defect {defect:.3e} exceeds {MASS_TOL:g}; the phase window "
                f"(aMin={cfg.aMin:g}, aMax={cfg.aMax:g}, bMax={cfg.bMax:g}) is too small"
            ),
        ),
        _check("bound.supAtMostAlpha", excess <= SUP_TOL, excess, SUP_TOL),
        _check("bound.fiducialSaturatesAtIdentity", sat <= SUP_TOL, sat, SUP_TOL),
        _check("covariance.randomFunction", worst_cov <= COVARIANCE_TOL, worst_cov, COVARIANCE_TOL),
    ]
    summary = {"masses": masses, "isometryDefect": defect, "supMax": max(sups)}
    return checks, summary


def _fiducial_numerics(cfg: RunConfig, kg: KGrid, grid):
    alphas = sorted(set(VERIFY_ALPHAS) | {cfg.alpha})
    renyi, entropy, checks = [], [], []
    for a in alphas:
        field = transform_field(normalized_fiducial(a, kg), a, grid, check=False)
        for s in cfg.sValues:
            rep = renyi_functional(field, s)
            rel = abs(rep.gap) / rep.conjecturedMax
            renyi.append({**rep.to_dict(), "relativeError": rel})
            checks.append(_check(f"fiducial.renyi[s={s:g},alpha={a:g}]", rel <= RENYI_TOL, rel, RENYI_TOL))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            S = wehrl_entropy(field)
        dS = entropy_from_renyi_derivative(field)
        Smin = minimal_entropy(a)
        entropy.append({"alpha": a, "wehrl": S, "renyiDerivative": dS, "minimalEntropy": Smin})
        checks.append(_check(f"fiducial.entropy[alpha={a:g}]", abs(S - Smin) <= ENTROPY_TOL, abs(S - Smin), ENTROPY_TOL))
        checks.append(_check(f"fiducial.entropyDerivative[alpha={a:g}]", abs(dS - S) <= ENTROPY_TOL, abs(dS - S), ENTROPY_TOL))
    return checks, renyi, entropy


def cmd_verify(cfg: RunConfig) -> int:
    kg = cfg.kgrid()
    grid = build_phase_grid(cfg.phase_spec())
    checks = _closed_form_checks()
    iso_checks, iso = _isometry_checks(cfg, kg, grid)
    num_checks, renyi, entropy = _fiducial_numerics(cfg, kg, grid)
    checks += iso_checks + num_checks
    passed = all(c["passed"] for c in checks)
    out = Path(cfg.outputDir)
    write_json(
        out / "verify.json",
        _record(cfg, "verify", passed=passed, checks=checks, fiducialRenyi=renyi, entropy=entropy, isometry=iso),
    )
    if cfg.emitFields:
        transform_field(normalized_fiducial(cfg.alpha, kg), cfg.alpha, grid, check=False).to_csv(
            out / "verify_fiducial_field.csv"
        )
    for c in checks:
        if not c["passed"]:
            log.error("FAIL %s: %.3e > %g %s", c["name"], c["value"], c["tolerance"], c.get("diagnostic") or "")
    return EXIT_OK if passed else EXIT_FAIL


# search

def cmd_search(cfg: RunConfig) -> int:
    out = Path(cfg.outputDir)
    spec = basis.BasisSpec(cfg.alpha, cfg.dim)
    runs, violations = [], 0
    for s in cfg.sValues:
        log.info("search s=%g alpha=%g dim=%d restarts=%d", s, cfg.alpha, cfg.dim, cfg.restarts)
        outcome = probe(spec, s, cfg.restarts, cfg.seed, eval_grid=cfg.phase_spec(), workers=cfg.workers)
        tag = f"s{s:g}_alpha{cfg.alpha:g}"
        name = f"search_{tag}.json"
        write_json(out / name, _record(cfg, "search", s=s, alpha=cfg.alpha, **outcome.to_dict()))
        final = outcome.escalated or outcome.result
        entry = {
            "s": s,
            "alpha": cfg.alpha,
            "value": final.value,
            "gap": final.gap,
            "errorEstimate": final.errorEstimate,
            "fidelityToOrbit": final.fidelityToOrbit,
            "escalated": outcome.escalated is not None,
            "persistent": outcome.persistent,
            "file": name,
        }
        if outcome.persistent:
            violations += 1
            cx = f"counterexample_{tag}.json"
            write_json(
                out / cx,
                _record(cfg, "counterexample", s=s, alpha=cfg.alpha, coefficients=final.to_dict()["coefficients"], report=outcome.to_dict()),
            )
            entry["counterexample"] = cx
            log.warning("persistent violation at s=%g alpha=%g, archived in %s", s, cfg.alpha, cx)
        runs.append(entry)
    write_json(out / "search_verdict.json", _record(cfg, "search-verdict", violations=violations, runs=runs))
    return EXIT_COUNTEREXAMPLE if violations else EXIT_OK


# bergman

def cmd_bergman(cfg: RunConfig) -> int:
    alpha = 0.5
    out = Path(cfg.outputDir)
    kb = bergman_kgrid()
    kh = cfg.kgrid()
    hgrid = build_phase_grid(cfg.phase_spec())
    checks = []

    f0 = normalized_fiducial(alpha, kb)
    randoms = [basis.random_coefficients(_rng(cfg.seed, 4, i), max(cfg.dim, 8)) for i in range(3)]
    funcs = [f0] + [basis.synthesize(c, alpha, kb) for c in randoms]
    norms = {}
    for i, f in enumerate(funcs):
        norms[i] = weighted_norms(paley_wiener(f), cfg.sValues)
    uni = max(abs(norms[i][0].l2norm - f.norm_squared()) for i, f in enumerate(funcs))
    checks.append(_check("bergman.unitarity", uni <= UNITARITY_TOL, uni, UNITARITY_TOL))

    pts = [(a, b) for a in (0.1, 0.5, 1.0, 2.0, 5.0) for b in (-1.0, -0.2, 0.0, 0.3, 2.0)]
    a_pts = np.array([p[0] for p in pts])
    b_pts = np.array([p[1] for p in pts])
    z = 2 * np.pi * b_pts + 1j * a_pts
    closed = np.max(np.abs(fiducial_transform(alpha, a_pts, b_pts) - math.sqrt(2 * math.pi) * a_pts * (-(2 / math.sqrt(math.pi)) * (z + 1j) ** -2)))
    quad = max(husimi_relation_check(f, pts) for f in funcs)
    checks.append(_check("bergman.relationClosedForm", closed <= RELATION_TOL, closed, RELATION_TOL))
    checks.append(_check("bergman.relationQuadrature", quad <= RELATION_TOL, quad, RELATION_TOL))

    dictionary = []
    for i, c in enumerate(randoms, 1):
        field = transform_field(basis.synthesize(c, alpha, kh), alpha, hgrid, check=False)
        for w in norms[i]:
            rep = renyi_functional(field, w.s)
            scale = (2 * math.pi) ** (w.s - 1)
            diff = abs(scale * w.lhs - rep.value)
            bar = scale * w.lhsError + rep.errorEstimate
            dictionary.append({"s": w.s, "transported": scale * w.lhs, "renyi": rep.value, "difference": diff, "combinedError": bar})
            checks.append(_check(f"bergman.dictionary[f={i},s={w.s:g}]", diff <= bar, diff, bar))

    records = []
    for s in cfg.sValues:
        rec = sharp_constant_probe(s)
        ratios = [weighted_norm(RationalExtremal(z0), s, estimate_error=False).ratio for z0 in Z0_SET]
        spread = (max(ratios) - min(ratios)) / rec.ratioExtremal
        closed_err = abs(rec.ratioExtremal - rec.closedFormRatio)
        checks.append(_check(f"bergman.z0Invariance[s={s:g}]", spread <= INVARIANCE_TOL, spread, INVARIANCE_TOL))
        checks.append(_check(f"bergman.ratioError[s={s:g}]", rec.error <= SHARP_ERROR_TOL, rec.error, SHARP_ERROR_TOL))
        checks.append(_check(f"bergman.ratioClosedForm[s={s:g}]", closed_err <= max(rec.error, 1e-12), closed_err, rec.error))
        body = {**rec.to_dict(), "z0Ratios": ratios, "paperToMeasured": rec.paperConstant / rec.ratioExtremal}
        name = f"bergman_s{s:g}.json"
        write_json(out / name, _record(cfg, "bergman", alpha=alpha, window=asdict(BERGMAN_WINDOW), **body))
        records.append(name)
    passed = all(c["passed"] for c in checks)
    write_json(out / "bergman_checks.json", _record(cfg, "bergman-checks", alpha=alpha, passed=passed, checks=checks, dictionary=dictionary, records=records))
    for c in checks:
        if not c["passed"]:
            log.error("FAIL %s: %.3e > %.3e", c["name"], c["value"], c["tolerance"])
    return EXIT_OK if passed else EXIT_FAIL


# field

def _complex(text: str) -> complex:
    t = text.strip().replace("i", "j")
    if not t:
        raise ConfigError("empty number in f-spec")
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_fspec(text: str, alpha: float, kg: KGrid):
    """fiducial | laguerre:c0,c1,... | family:A,B  ->  (normalized SampledFunction, description)."""
    text = (text or "").strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "fiducial" and not rest.strip():
        return normalized_fiducial(alpha, kg), {"kind": "fiducial"}
    if kind == "laguerre":
        c = np.array([_complex(p) for p in rest.split(",")])
        if not np.any(c):
            raise ConfigError("laguerre coefficients are all zero")
        if len(c) > 64:
            raise ConfigError("at most 64 laguerre coefficients")
        nrm = float(np.linalg.norm(c))
        return basis.synthesize(c / nrm, alpha, kg), {"kind": "laguerre", "inputNorm": nrm, "coefficients": [[z.real, z.imag] for z in c / nrm]}
    if kind == "family":
        parts = rest.split(",")
        if len(parts) != 2:
            raise ConfigError("family needs exactly A,B")
        A, B = (_complex(p) for p in parts)
        if A == 0:
            raise ConfigError("family needs A != 0")
        if not B.real > 0:
            raise ConfigError("family needs Re B > 0")
        return maximizer_family(A, B, kg, alpha, normalize=True), {"kind": "family", "A": [A.real, A.imag], "B": [B.real, B.imag]}
    raise ConfigError(f"malformed f-spec {text!r}; expected fiducial, laguerre:c0,c1,... or family:A,B")


def cmd_field(cfg: RunConfig) -> int:
    kg = cfg.kgrid()
    f, desc = parse_fspec(cfg.fSpec, cfg.alpha, kg)
    grid = build_phase_grid(cfg.phase_spec())
    field: HusimiField = transform_field(f, cfg.alpha, grid, check=False)
    sup, at = sup_bound_check(field)
    mass = field.mass()
    out = Path(cfg.outputDir)
    out.mkdir(parents=True, exist_ok=True)
    field.to_csv(out / "field.csv")
    write_json(
        out / "field.json",
        _record(
            cfg,
            "field",
            fSpec=desc,
            alpha=cfg.alpha,
            csv="field.csv",
            norm=f.norm_squared(),
            mass=mass,
            isometryDefect=abs(mass - f.norm_squared()),
            sup=sup,
            supAt={"a": at.a, "b": at.b},
            supBound=cfg.alpha,
            supBoundHolds=bool(sup <= cfg.alpha + SUP_TOL),
            renyi=[renyi_functional(field, s).to_dict() for s in cfg.sValues],
        ),
    )
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "search": cmd_search, "bergman": cmd_bergman, "field": cmd_field}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", metavar="PATH", help="flat key=value config file")
    g.add_argument("--alpha", type=float)
    g.add_argument("--s", dest="sValues", metavar="LIST", help="comma-separated s values")
    g.add_argument("--dim", type=int)
    g.add_argument("--restarts", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", dest="outputDir", metavar="DIR")
    g.add_argument("--deterministic", action="store_const", const="true", default=None,
                   help="single-threaded summation, byte-reproducible JSON")
    g.add_argument("--emit-fields", dest="emitFields", action="store_const", const="true", default=None)
    g.add_argument("--workers", type=int, help="parallel optimizer restarts")
    grid = common.add_argument_group("grids")
    grid.add_argument("--n", type=int, help="k-grid nodes (default: from the phase budget)")
    grid.add_argument("--k-max", dest="kMax", type=float)
    grid.add_argument("--n-a", dest="nA", type=int)
    grid.add_argument("--n-b", dest="nB", type=int)
    grid.add_argument("--a-min", dest="aMin", type=float)
    grid.add_argument("--a-max", dest="aMax", type=float)
    grid.add_argument("--b-max", dest="bMax", type=float)
    grid.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="affine-wehrl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="closed forms, isometry, fiducial numerics")
    sub.add_parser("search", parents=[common], help="maximize the Renyi functional")
    sub.add_parser("bergman", parents=[common], help="half-plane reformulation at alpha = 1/2")
    fp = sub.add_parser("field", parents=[common], help="export a Husimi field as CSV")
    fp.add_argument("--f", dest="fSpec", metavar="SPEC", help="fiducial | laguerre:c0,c1,... | family:A,B")
    return parser


_OVERRIDE_KEYS = [f.name for f in fields(RunConfig)]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        file_values = {}
        if args.config:
            try:
                file_values = parse_config_text(Path(args.config).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
        cfg = build_config(file_values, overrides)
        set_nufft_threads(1 if cfg.deterministic else 0)
        if cfg.deterministic:
            cfg = replace(cfg, workers=1)
        return COMMANDS[args.command](cfg)
    except (ConfigError, GridError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
