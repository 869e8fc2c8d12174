"""Construction of constant-amplitude sequences and their orthogonal families.

Sequences are specified in frequency domain by a unit-modulus vector chi;
the transmitted vector is q[n] = N^(-1/2) (-1)^(n*gamma) chi[n].  Families
come in several kinds: phase-assigned over a factor multiset of N (pma and
its degenerate variants), concatenations over an additive decomposition of
N (hat kinds), phase-rotation-augmented concatenations (apma/adpma), plus
Zadoff-Chu and m-sequence baselines.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import factorlab
from .factorlab import (
    Decomposition,
    DomainError,
    FactorSet,
    InfeasibleError,
    prime_factorize,
)

FAMILY_KINDS = (
    "pma", "dpma", "near_dpma", "hat_pma", "hat_dpma", "apma", "adpma", "zc", "pn",
)
HAT_KINDS = ("hat_pma", "hat_dpma", "apma", "adpma")
ORTHOGONAL_KINDS = ("pma", "dpma", "near_dpma", "hat_pma", "hat_dpma", "apma", "adpma")


@dataclass(frozen=True)
class WaveformConfig:
    """OFDM waveform parameters, with the useful-interval length as time unit.

    alpha is the guard ratio (an exact rational so the integrality of
    alpha*gamma is decided exactly); gamma the subcarrier interleaving
    factor.  Durations: T_d = 1, T_g = alpha, T = 1 + alpha; subcarrier
    spacing 1/T_d = 1.
    """

    n_seq: int
    gamma: int = 1
    alpha: Fraction = Fraction(33, 256)

    def __post_init__(self):
        if self.n_seq < 2:
            raise DomainError("sequence length must be >= 2")
        if self.gamma < 1:
            raise DomainError("gamma must be a positive integer")
        if not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")

    @property
    def alpha_gamma(self) -> Fraction:
        return self.alpha * self.gamma

    @property
    def condition(self) -> str:
        """'A' when alpha*gamma is an integer, else 'B'."""
        return "A" if self.alpha_gamma.denominator == 1 else "B"

    @property
    def pulse_duration(self) -> float:
        return 1.0 + float(self.alpha)


def _unit_phases(numerators: np.ndarray, denominator: int) -> np.ndarray:
    """exp(2j*pi*numerators/denominator) with the fraction reduced mod 1 first.

    Keeping the phase an exact integer ratio until the single trig call
    avoids accumulation drift over products of many roots of unity.
    """
    frac = np.mod(numerators, denominator)
    return np.exp(2j * np.pi * (frac / denominator))


@dataclass(frozen=True)
class CaSequence:
    """A length-N unit-modulus frequency-domain sequence plus its metadata."""

    chi: np.ndarray
    cfg: WaveformConfig
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.chi)

    @property
    def q(self) -> np.ndarray:
        """Transmitted vector N^(-1/2) (-1)^(n*gamma) chi[n]."""
        n = np.arange(self.n)
        signs = np.where((n * self.cfg.gamma) % 2 == 0, 1.0, -1.0)
        return signs * self.chi / math.sqrt(self.n)


@dataclass
class Family:
    """A set of same-length sequences built by one construction."""

    sequences: list[CaSequence]
    kind: str
    cfg: WaveformConfig
    sd_order_bound: int
    family_csd: int | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def n(self) -> int:
        return self.cfg.n_seq

    def q_matrix(self) -> np.ndarray:
        """Member q vectors stacked as rows (len(family) x N)."""
        return np.vstack([s.q for s in self.sequences])


@dataclass(frozen=True)
class RotationSolution:
    """Per-part rotation phases closing the part-length vectors to zero."""

    theta: tuple[float, ...]
    radius_estimate: float
    arc_angles: tuple[float, ...]
    residual: float
    epsilon: float


def _mixed_radix_digits(n_index: np.ndarray, weights: Sequence[int],
                        bases: Sequence[int]) -> list[np.ndarray]:
    return [(n_index // w) % b for w, b in zip(weights, bases)]


def _phase_numerators(digits: list[np.ndarray], bases: Sequence[int],
                      nu: Sequence[int], weights: Sequence[int],
                      cfg: WaveformConfig) -> tuple[np.ndarray, int]:
    """Integer numerators of phase/(2*pi) over a common denominator."""
    ag = cfg.alpha_gamma
    denom = math.lcm(*bases, ag.denominator if cfg.condition == "B" else 1)
    numer = np.zeros(len(digits[0]), dtype=np.int64)
    for m, (l_m, a_m, v_m) in enumerate(zip(digits, bases, nu)):
        numer += (v_m * (denom // a_m)) * l_m
        if cfg.condition == "B" and m % 2 == 1:
            numer += (ag.numerator * (denom // ag.denominator) * weights[m]) * l_m
    return numer, denom


def _validate_nu(nu: Sequence[int], bases: Sequence[int]):
    if len(nu) != len(bases):
        raise DomainError(f"index vector length {len(nu)} != {len(bases)} factors")
    for v, a in zip(nu, bases):
        if not 1 <= v <= a - 1:
            raise DomainError(f"index {v} outside [1, {a - 1}]")


def _build_chi(factors: Sequence[int], nu: Sequence[int], weights: Sequence[int],
               cfg: WaveformConfig, length: int) -> np.ndarray:
    _validate_nu(nu, factors)
    n_index = np.arange(length)
    digits = _mixed_radix_digits(n_index, weights, factors)
    numer, denom = _phase_numerators(digits, factors, nu, weights, cfg)
    return _unit_phases(numer, denom)


def build_g_sequence(factors: Sequence[int], nu: Sequence[int],
                     cfg: WaveformConfig) -> CaSequence:
    """Phase-assigned sequence over descending factors of N.

    Index n decomposes in the mixed radix with digit weights
    phi_0 = 1, phi_m = prod(factors[:m]); digit m contributes phase
    2*pi*nu_m*l_m/A_m, and under a fractional alpha*gamma the odd digits
    add 2*pi*alpha*gamma*l_m*phi_m.
    """
    factors = tuple(factors)
    if list(factors) != sorted(factors, reverse=True):
        raise DomainError("factors must be sorted descending")
    n = math.prod(factors)
    if n != cfg.n_seq:
        raise DomainError(f"factors multiply to {n}, config says {cfg.n_seq}")
    weights = [1]
    for a in factors[:-1]:
        weights.append(weights[-1] * a)
    chi = _build_chi(factors, nu, weights, cfg, n)
    return CaSequence(chi, cfg, meta={
        "kind": "g", "factors": list(factors), "nu": list(nu)})


def build_i_sequence(factors: Sequence[int], nu: Sequence[int],
                     cfg: WaveformConfig) -> CaSequence:
    """Companion construction over ascending factors with reversed weights
    psi_m = N / prod(factors[:m+1]), psi_last = 1."""
    factors = tuple(factors)
    if list(factors) != sorted(factors):
        raise DomainError("factors must be sorted ascending")
    n = math.prod(factors)
    if n != cfg.n_seq:
        raise DomainError(f"factors multiply to {n}, config says {cfg.n_seq}")
    weights = []
    acc = n
    for a in factors:
        acc //= a
        weights.append(acc)
    chi = _build_chi(factors, nu, weights, cfg, n)
    return CaSequence(chi, cfg, meta={
        "kind": "i", "factors": list(factors), "nu": list(nu)})


def build_hat_sequence(decomp: Decomposition,
                       per_part_factors: Sequence[Sequence[int]],
                       per_part_nu: Sequence[Sequence[int]],
                       cfg: WaveformConfig,
                       rotation: Sequence[float] | None = None) -> CaSequence:
    """Concatenation of per-part phase-assigned subsequences.

    Each part is built like build_g_sequence over its own (descending)
    factor set and digit positions; an optional rotation multiplies part
    rho by exp(1j*theta_rho).  The alternating sign in q uses the absolute
    index across the concatenation.
    """
    if decomp.n != cfg.n_seq:
        raise DomainError(f"decomposition of {decomp.n}, config says {cfg.n_seq}")
    if len(per_part_factors) != len(decomp.parts) or len(per_part_nu) != len(decomp.parts):
        raise DomainError("need one factor set and one index vector per part")
    pieces = []
    for rho, (part, factors, nu) in enumerate(
            zip(decomp.parts, per_part_factors, per_part_nu)):
        factors = tuple(sorted(factors, reverse=True))
        if math.prod(factors) != part:
            raise DomainError(f"part {part} != product of {factors}")
        weights = [1]
        for a in factors[:-1]:
            weights.append(weights[-1] * a)
        chi_part = _build_chi(factors, nu, weights, cfg, part)
        if rotation is not None:
            chi_part = chi_part * np.exp(1j * rotation[rho])
        pieces.append(chi_part)
    chi = np.concatenate(pieces)
    return CaSequence(chi, cfg, meta={
        "kind": "hat",
        "parts": list(decomp.parts),
        "factor_sets": [sorted(f, reverse=True) for f in per_part_factors],
        "nu": [list(v) for v in per_part_nu],
        "rotation": None if rotation is None else [float(t) for t in rotation],
    })


def _nu_vectors(factors: Sequence[int]) -> list[tuple[int, ...]]:
    """All admissible index vectors, lexicographic."""
    return list(itertools.product(*(range(1, a) for a in factors)))


def solve_rotation(parts: Sequence[int], epsilon: float = 1e-9,
                   max_iter: int = 200) -> RotationSolution:
    """Rotation phases making the part-length vectors sum to zero.

    Bisection on the first arc angle of the circumscribed circle of the
    polygon with the part lengths as edges; feasible exactly when there
    are at least 3 parts and no part reaches half the perimeter.
    """
    parts = tuple(parts)
    total = sum(parts)
    if list(parts) != sorted(parts, reverse=True):
        raise DomainError("parts must be non-increasing")
    if len(parts) < 3 or 2 * max(parts) >= total:
        raise InfeasibleError(
            f"no rotation exists for parts {parts}: need >= 3 parts, "
            f"max part below half the total")
    theta_lo, theta_hi = 0.0, 2.0 * math.pi
    arcs = None
    for _ in range(max_iter):
        theta_mid = 0.5 * (theta_lo + theta_hi)
        radius = parts[0] / (2.0 * math.sin(theta_mid / 2.0))
        arcs = [theta_mid]
        for p in parts[1:]:
            arg = 1.0 - p * p / (2.0 * radius * radius)
            arcs.append(math.acos(max(-1.0, min(1.0, arg))))
        gap = sum(arcs) - 2.0 * math.pi
        if abs(gap) <= epsilon:
            break
        if gap < 0:
            theta_lo = theta_mid
        else:
            theta_hi = theta_mid
    else:
        raise InfeasibleError(f"rotation bisection did not reach {epsilon}")
    theta = [0.0]
    for rho in range(1, len(parts)):
        theta.append(theta[-1] + 0.5 * (arcs[rho - 1] + arcs[rho]))
    residual = abs(sum(p * np.exp(1j * t) for p, t in zip(parts, theta)))
    return RotationSolution(tuple(theta), radius, tuple(arcs), float(residual), epsilon)


def _per_part_factor_sets(decomp: Decomposition, kappa: int) -> list[FactorSet]:
    """Proper level-(omega(part)-kappa) factor set for every part."""
    out = []
    for part in decomp.parts:
        pf = prime_factorize(part)
        if kappa == 0:
            fs = FactorSet(part, pf.primes, kappa=0)
        elif kappa >= pf.omega:
            raise DomainError(
                f"kappa={kappa} leaves no factor for part {part} (omega={pf.omega})")
        elif kappa == 1 and pf.omega > 2:
            fs = factorlab.proper_factorization_kappa1(pf)
        elif kappa == 2 and pf.omega > 3:
            fs = factorlab.proper_factorization_kappa2(pf)
        else:
            fs = factorlab.exclusive_search_proper(pf, kappa)
        out.append(fs)
    return out


def _sd_bound(level: int, cfg: WaveformConfig) -> int:
    return level if cfg.condition == "A" else level // 2


def _build_flat_family(kind: str, fs: FactorSet, cfg: WaveformConfig) -> Family:
    factors = fs.sorted_descending()
    nus = _nu_vectors(factors)
    seqs = [build_g_sequence(factors, nu, cfg) for nu in nus]
    return Family(
        sequences=seqs, kind=kind, cfg=cfg,
        sd_order_bound=_sd_bound(len(factors), cfg),
        family_csd=fs.family_csd,
        meta={"factor_set": list(factors), "kappa": fs.kappa,
              "nu_vectors": [list(v) for v in nus]},
    )


def _build_hat_family(kind: str, decomp: Decomposition,
                      factor_sets: list[FactorSet], cfg: WaveformConfig,
                      kappa: int) -> Family:
    per_part_factors = [fs.sorted_descending() for fs in factor_sets]
    per_part_nus = [_nu_vectors(f) for f in per_part_factors]
    count = min(len(nus) for nus in per_part_nus)
    seqs = []
    chosen = []
    for i in range(count):
        nu_set = [per_part_nus[rho][i] for rho in range(len(decomp.parts))]
        seqs.append(build_hat_sequence(decomp, per_part_factors, nu_set, cfg))
        chosen.append([list(v) for v in nu_set])
    return Family(
        sequences=seqs, kind=kind, cfg=cfg,
        sd_order_bound=_sd_bound(decomp.min_omega - kappa, cfg),
        family_csd=None,
        meta={"decomposition": list(decomp.parts),
              "factor_sets": [list(f) for f in per_part_factors],
              "kappa": kappa,
              "nu_vectors": chosen,
              "no_sd_gain": decomp.mpo == prime_factorize(decomp.n).omega},
    )


def build_family(kind: str, cfg: WaveformConfig, kappa: int = 0,
                 decomp: Decomposition | None = None,
                 count: int | None = None, min_csd: int | None = None,
                 roots: Sequence[int] = (1, 2)) -> Family:
    """Construct a full sequence family of the given kind.

    kappa selects the degeneracy level for dpma/near_dpma/hat_dpma/adpma;
    decomp supplies the additive decomposition for hat kinds (computed
    when omitted).  count/min_csd/roots configure the zc and pn baselines.
    """
    n = cfg.n_seq
    if kind not in FAMILY_KINDS:
        raise DomainError(f"unknown family kind {kind!r}")

    if kind == "pma":
        pf = prime_factorize(n)
        return _build_flat_family(kind, FactorSet(n, pf.primes, kappa=0), cfg)

    if kind in ("dpma", "near_dpma"):
        pf = prime_factorize(n)
        if pf.omega <= 2:
            raise DomainError(f"degenerate families need omega > 2, got {pf.omega}")
        if kind == "dpma":
            if not 1 <= kappa <= pf.omega - 1:
                raise DomainError(f"kappa must be in [1, {pf.omega - 1}]")
            if kappa == 1:
                fs = factorlab.proper_factorization_kappa1(pf)
            elif kappa == 2 and pf.omega > 3:
                fs = factorlab.proper_factorization_kappa2(pf)
            else:
                fs = factorlab.exclusive_search_proper(pf, kappa)
        else:
            fs = factorlab.near_proper_factorization(pf, kappa)
        return _build_flat_family(kind, fs, cfg)

    if kind in HAT_KINDS:
        augmented = kind in ("apma", "adpma")
        part_kappa = kappa if kind in ("hat_dpma", "adpma") else 0
        if decomp is None:
            if augmented:
                pf = prime_factorize(n)
                decomp = factorlab.mpo_decompose(n, require_restriction_a=True)
                if not decomp.at_mpo and decomp.mpo == pf.omega:
                    raise InfeasibleError(
                        f"augmentation infeasible for N={n}: the largest "
                        f"min-omega level {decomp.mpo} equals omega(N) and is "
                        f"achieved only without >= 3 parts below N/2")
            else:
                decomp = factorlab.mpo_decompose(n)
        elif decomp.mpo == 0:
            decomp = Decomposition(n, decomp.parts, mpo=factorlab.mpo_value(n))
        if part_kappa and not 1 <= part_kappa <= decomp.min_omega - 1:
            raise DomainError(
                f"kappa must be in [1, {decomp.min_omega - 1}] for parts "
                f"{decomp.parts}")
        factor_sets = _per_part_factor_sets(decomp, part_kappa)
        base_kind = "hat_dpma" if part_kappa else "hat_pma"
        fam = _build_hat_family(base_kind, decomp, factor_sets, cfg, part_kappa)
        if augmented:
            fam = augment_family(fam)
            fam.kind = kind
        return fam

    if kind == "zc":
        if count is None or min_csd is None:
            raise DomainError("zc baseline needs count and min_csd")
        return build_multiroot_zc_family(cfg, count, min_csd, roots)

    if kind == "pn":
        if count is None or min_csd is None:
            raise DomainError("pn baseline needs count and min_csd")
        return build_pn_family(cfg, count, min_csd)

    raise DomainError(f"unhandled kind {kind!r}")


def augment_family(base: Family) -> Family:
    """Double a concatenated family by appending per-part phase-rotated copies.

    The rotation phases solve the closure condition over the part lengths,
    so each rotated copy is orthogonal to its original; all cross pairs are
    orthogonal already by the phase-assignment structure.
    """
    if base.kind not in ("hat_pma", "hat_dpma"):
        raise DomainError(f"can only augment hat families, got {base.kind!r}")
    parts = tuple(base.meta["decomposition"])
    if len(parts) < 3 or 2 * max(parts) >= sum(parts):
        raise InfeasibleError(
            f"decomposition {parts} admits no rotation: need >= 3 parts, "
            f"max part below half the total")
    sol = solve_rotation(parts, epsilon=1e-9)
    # store degrees once and rebuild phases from them so that a family
    # reloaded from JSON metadata reproduces the same bits
    theta_deg = [math.degrees(t) for t in sol.theta]
    theta = [math.radians(d) for d in theta_deg]
    decomp = Decomposition(base.n, parts, mpo=0)
    rotated = []
    for nu_set in base.meta["nu_vectors"]:
        rotated.append(build_hat_sequence(
            decomp, base.meta["factor_sets"], nu_set, base.cfg, rotation=theta))
    new_kind = "apma" if base.kind == "hat_pma" else "adpma"
    meta = dict(base.meta)
    meta["theta_degrees"] = theta_deg
    meta["rotation_residual"] = sol.residual
    return Family(
        sequences=list(base.sequences) + rotated, kind=new_kind, cfg=base.cfg,
        sd_order_bound=base.sd_order_bound, family_csd=None, meta=meta)


def cs_subfamily(leader: CaSequence, p_max: int | None = None) -> list[CaSequence]:
    """Cyclic-shift subfamily of a flat phase-assigned leader.

    Admissible shifts are l*N/p_max for l in 0..p_max-1 except
    l = p_max - nu_0; shifting by k multiplies q[n] by exp(2j*pi*n*k/N),
    which lands on the member whose leading index is nu_0 + l.
    """
    factors = leader.meta.get("factors")
    nu = leader.meta.get("nu")
    if factors is None or nu is None:
        raise DomainError("leader must come from a flat family build")
    if p_max is None:
        p_max = max(factors)
    if factors[0] != p_max:
        raise DomainError("leading factor must be the largest")
    n = leader.n
    v0 = nu[0]
    out = []
    for l in range(p_max):
        if l == p_max - v0:
            continue
        k = l * (n // p_max)
        chi = leader.chi * _unit_phases(np.arange(n) * k, n)
        meta = dict(leader.meta)
        meta["cyclic_shift"] = k
        meta["nu"] = [(v0 + l) % p_max] + list(nu[1:])
        out.append(CaSequence(chi, leader.cfg, meta=meta))
    return out


def build_zc_sequence(root: int, n: int, cfg: WaveformConfig | None = None) -> CaSequence:
    """Zadoff-Chu sequence of the given root, as a transmitted baseline.

    chi absorbs the alternating sign so that q is exactly the normalized
    Zadoff-Chu vector.
    """
    if cfg is None:
        cfg = WaveformConfig(n_seq=n)
    if math.gcd(root, n) != 1:
        raise DomainError(f"root {root} not coprime to {n}")
    k = np.arange(n)
    if n % 2:
        zc = _unit_phases(-root * (k * (k + 1) // 2), n)
    else:
        zc = _unit_phases(-root * k * k, 2 * n)
    signs = np.where((k * cfg.gamma) % 2 == 0, 1.0, -1.0)
    return CaSequence(signs * zc, cfg, meta={"kind": "zc", "root": root})


def build_multiroot_zc_family(cfg: WaveformConfig, count: int, min_csd: int,
                              roots: Sequence[int] = (1, 2)) -> Family:
    """Baseline of cyclically shifted Zadoff-Chu sequences.

    floor(N/min_csd) shifts come from the first root; the remainder from
    the following roots.  Shifts within a root are orthogonal; sequences
    from different roots are not.
    """
    n = cfg.n_seq
    per_root = n // min_csd
    if count > per_root * len(roots):
        raise DomainError(
            f"{count} sequences need more than {len(roots)} roots at "
            f"min_csd={min_csd}")
    seqs = []
    used = []
    for root in roots:
        if len(seqs) == count:
            break
        base = build_zc_sequence(root, n, cfg)
        for shift_idx in range(per_root):
            if len(seqs) == count:
                break
            k = shift_idx * min_csd
            chi = base.chi * _unit_phases(np.arange(n) * k, n)
            seqs.append(CaSequence(chi, cfg, meta={
                "kind": "zc", "root": root, "cyclic_shift": k}))
            used.append({"root": root, "cyclic_shift": k})
    return Family(sequences=seqs, kind="zc", cfg=cfg, sd_order_bound=0,
                  family_csd=min_csd,
                  meta={"roots": list(roots), "min_csd": min_csd, "members": used})


def m_sequence(register_len: int = 15, taps: Sequence[int] = (15, 14)) -> np.ndarray:
    """Maximal-length LFSR bit sequence, period 2**register_len - 1.

    taps give the delayed outputs XOR-ed into the input, 1-indexed;
    the register starts all-ones.
    """
    period = (1 << register_len) - 1
    state = [1] * register_len
    bits = np.empty(period, dtype=np.int8)
    for i in range(period):
        bits[i] = state[-1]
        fb = 0
        for t in taps:
            fb ^= state[t - 1]
        state = [fb] + state[:-1]
    return bits


def build_pn_family(cfg: WaveformConfig, count: int, min_csd: int) -> Family:
    """BPSK m-sequence baseline: members are offsets of one long register run.

    The register polynomial is X^15 + X^14 + 1; member k starts at offset
    k*min_csd into the period-32767 bit stream and is truncated to N.
    """
    n = cfg.n_seq
    period = (1 << 15) - 1
    if n > period:
        raise DomainError(f"sequence length {n} exceeds the register period {period}")
    if count * min_csd > period:
        raise DomainError(
            f"{count} members at spacing {min_csd} exceed the register period")
    bits = m_sequence()
    idx = np.arange(n)
    signs = np.where((idx * cfg.gamma) % 2 == 0, 1.0, -1.0)
    seqs = []
    for k in range(count):
        offset = k * min_csd
        bpsk = 1.0 - 2.0 * bits[(offset + idx) % period].astype(np.float64)
        seqs.append(CaSequence(signs * bpsk.astype(np.complex128), cfg,
                               meta={"kind": "pn", "offset": offset}))
    return Family(sequences=seqs, kind="pn", cfg=cfg, sd_order_bound=0,
                  family_csd=min_csd, meta={"min_csd": min_csd, "taps": [15, 14]})


def family_to_dict(family: Family, include_sequences: bool = False) -> dict:
    """JSON-ready description; sequences regenerate from the metadata."""
    out = {
        "kind": family.kind,
        "n": family.n,
        "gamma": family.cfg.gamma,
        "alpha": f"{family.cfg.alpha.numerator}/{family.cfg.alpha.denominator}",
        "sd_order_bound": family.sd_order_bound,
        "family_csd": family.family_csd,
        "size": len(family),
    }
    for key in ("factor_set", "factor_sets", "decomposition", "nu_vectors",
                "theta_degrees", "kappa", "roots", "min_csd", "members",
                "taps", "no_sd_gain"):
        if key in family.meta:
            out[key] = family.meta[key]
    if include_sequences:
        out["sequences"] = [
            [[float(c.real), float(c.imag)] for c in seq.chi]
            for seq in family.sequences
        ]
    return out


def family_from_dict(data: dict) -> Family:
    """Rebuild a family from its exported description, bit-exactly."""
    num, den = data["alpha"].split("/")
    cfg = WaveformConfig(n_seq=int(data["n"]), gamma=int(data["gamma"]),
                         alpha=Fraction(int(num), int(den)))
    kind = data["kind"]
    if kind in ("pma", "dpma", "near_dpma"):
        factors = tuple(sorted(data["factor_set"], reverse=True))
        seqs = [build_g_sequence(factors, nu, cfg) for nu in data["nu_vectors"]]
        fam = Family(sequences=seqs, kind=kind, cfg=cfg,
                     sd_order_bound=int(data["sd_order_bound"]),
                     family_csd=data.get("family_csd"),
                     meta={"factor_set": list(factors),
                           "kappa": data.get("kappa", 0),
                           "nu_vectors": data["nu_vectors"]})
        return fam
    if kind in HAT_KINDS:
        parts = tuple(data["decomposition"])
        decomp = Decomposition(int(data["n"]), parts, mpo=0)
        theta = None
        if data.get("theta_degrees") is not None:
            theta = [math.radians(d) for d in data["theta_degrees"]]
        seqs = []
        nu_vectors = data["nu_vectors"]
        base_count = len(nu_vectors)
        for nu_set in nu_vectors:
            seqs.append(build_hat_sequence(decomp, data["factor_sets"], nu_set, cfg))
        if kind in ("apma", "adpma"):
            for nu_set in nu_vectors:
                seqs.append(build_hat_sequence(decomp, data["factor_sets"],
                                               nu_set, cfg, rotation=theta))
        meta = {"decomposition": list(parts),
                "factor_sets": data["factor_sets"],
                "kappa": data.get("kappa", 0),
                "nu_vectors": nu_vectors}
        if theta is not None:
            meta["theta_degrees"] = data["theta_degrees"]
        return Family(sequences=seqs, kind=kind, cfg=cfg,
                      sd_order_bound=int(data["sd_order_bound"]),
                      family_csd=data.get("family_csd"), meta=meta)
    if kind == "zc":
        fam = build_multiroot_zc_family(cfg, int(data["size"]),
                                        int(data["min_csd"]),
                                        tuple(data["roots"]))
        return fam
    if kind == "pn":
        return build_pn_family(cfg, int(data["size"]), int(data["min_csd"]))
    raise DomainError(f"unknown family kind {kind!r}")
