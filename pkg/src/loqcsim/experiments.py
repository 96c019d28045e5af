"""Catalogue of table-producing experiments driven by the command line.

Each experiment declares a parameter schema and a generator of rows; every
column name carries its unit in brackets.
"""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import fock, fusion, gkp, loops, nonfock, phasespace, qufti, sources, walk
from .errors import ConfigError
from .rng import make_rng

TYPES = ("int", "float", "str", "bool", "list[int]", "list[float]")


@dataclass(frozen=True)
class Param:
    type: str
    default: object
    help: str
    choices: tuple = None

    def to_dict(self):
        d = {"type": self.type, "default": self.default, "help": self.help}
        if self.choices:
            d["choices"] = list(self.choices)
        return d


def validate_value(name, param, value):
    """Coerce ``value`` to the declared type or raise ConfigError."""
    t = param.type
    if t == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif t == "float":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif t == "str":
        ok = isinstance(value, str)
    elif t == "bool":
        ok = isinstance(value, bool)
    elif t == "list[int]":
        ok = isinstance(value, (list, tuple)) and all(isinstance(v, int) and not isinstance(v, bool) for v in value)
        value = list(value) if ok else value
    elif t == "list[float]":
        ok = isinstance(value, (list, tuple)) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        value = [float(v) for v in value] if ok else value
    else:
        raise ConfigError(f"unknown schema type {t!r}")
    if not ok:
        raise ConfigError(f"parameter {name!r} expects {t}, got {value!r}")
    if param.choices and value not in param.choices:
        raise ConfigError(f"parameter {name!r} must be one of {list(param.choices)}")
    return value


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    columns: tuple
    params: dict
    run: object = field(repr=False)

    def schema(self):
        return {"name": self.name, "summary": self.summary, "columns": list(self.columns),
                "params": {k: v.to_dict() for k, v in self.params.items()}}

    def resolve(self, given):
        out = {}
        for k, param in self.params.items():
            out[k] = validate_value(k, param, given[k]) if k in given else param.default
        unknown = set(given) - set(self.params)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        return out


REGISTRY = {}


def experiment(name, summary, columns, **params):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, summary, tuple(columns), params, fn)
        return fn
    return wrap


def _pattern(cfg):
    return "(" + ",".join(str(c) for c in cfg) + ")"


@experiment("hom", "Two photons on a balanced beamsplitter",
            ["pattern [photons]", "probability [1]"])
def _hom(p, seed, threads):
    dist = fock.full_distribution(fock.hadamard(), (1, 1))
    for cfg, amp in dist.items():
        yield _pattern(cfg), abs(amp) ** 2


@experiment("distribution", "Full output distribution of Fock inputs through a random network",
            ["pattern [photons]", "amplitude_re [1]", "amplitude_im [1]", "probability [1]"],
            inputs=Param("list[int]", [1, 1, 0], "photons per input mode"),
            kind=Param("str", "haar-unitary", "network family", ("haar-unitary", "haar-orthogonal")))
def _distribution(p, seed, threads):
    U = fock.random_matrix(len(p["inputs"]), p["kind"], make_rng(seed, 0))
    for cfg, amp in fock.full_distribution(U, p["inputs"]).items():
        yield _pattern(cfg), amp.real, amp.imag, abs(amp) ** 2


@experiment("loop-loss", "Loss bias of the fiber-loop map",
            ["input_bin [1]", "output_bin [1]", "loss_factor [1]", "abs_ideal [1]", "abs_lossy [1]",
             "postselect_prob [1]"],
            m=Param("int", 3, "time bins"), loops=Param("int", 2, "inner-loop passes"),
            eta_f=Param("float", 0.99, "fiber efficiency per bin length"),
            eta_s=Param("float", 0.9, "switch efficiency"))
def _loop_loss(p, seed, threads):
    m, L = p["m"], p["loops"]
    rng = make_rng(seed, 0)
    seqs = [loops.random_sequence(m, rng) for _ in range(L)]
    res = loops.lossy_loop_map(seqs, m, p["eta_f"], p["eta_s"], L)
    ps = loops.postselect_prob(res.matrix, [1] * m)
    for i, j in product(range(m), repeat=2):
        yield i + 1, j + 1, res.loss[i, j], abs(res.ideal[i, j]), abs(res.matrix[i, j]), ps


@experiment("loop-similarity", "Best similarity found by random switch search",
            ["eta_f [1]", "similarity [1]"],
            m=Param("int", 3, "time bins"), loops=Param("int", 2, "inner-loop passes"),
            eta_f=Param("list[float]", [1.0, 0.99, 0.95, 0.9], "fiber efficiencies"),
            eta_s=Param("float", 1.0, "switch efficiency"),
            trials=Param("int", 300, "random sequences per point"))
def _loop_similarity(p, seed, threads):
    for k, ef in enumerate(p["eta_f"]):
        best, _ = loops.similarity_search(p["m"], p["loops"], ef, p["eta_s"], p["trials"], make_rng(seed, k))
        yield ef, best


@experiment("loop-mismatch", "Output fidelity under loop-length error and source jitter",
            ["delta_over_omega [1]", "sigma_over_omega [1]", "fidelity [1]"],
            m=Param("int", 3, "time bins"),
            delta=Param("list[float]", [0.0, 0.1, 0.2, 0.4], "loop-length error in widths"),
            sigma=Param("float", 0.0, "jitter standard deviation in widths"),
            trials=Param("int", 50, "jitter draws"))
def _loop_mismatch(p, seed, threads):
    seq = loops.random_sequence(p["m"], make_rng(seed, 0))
    for k, dl in enumerate(p["delta"]):
        f = loops.mismatch_fidelity(seq, p["m"], dl, p["sigma"], 1.0, p["trials"], make_rng(seed, 1, k))
        yield dl, p["sigma"], f


@experiment("qufti", "Signal and phase sensitivity of the Fourier interferometer",
            ["phi [rad]", "signal [1]", "slope [1/rad]", "delta_phi [rad]", "snl [rad]", "hl [rad]"],
            n=Param("int", 4, "photons and modes"),
            phi_min=Param("float", 0.001, "first phase"), phi_max=Param("float", 0.5, "last phase"),
            points=Param("int", 11, "grid points"),
            dephasing_var=Param("float", 0.0, "phase noise variance [rad^2]"))
def _qufti(p, seed, threads):
    _, snl, hl = qufti.orc_baselines(p["n"])
    for phi in np.linspace(p["phi_min"], p["phi_max"], p["points"]):
        s = qufti.signal_and_sensitivity(qufti.QuftiParams(p["n"], float(phi), p["dephasing_var"]))
        yield float(phi), s.P, s.dP_dphi, s.delta_phi, snl, hl


@experiment("qufti-conjecture", "Permanent product formula against Ryser",
            ["n [photons]", "max_abs_diff [1]"],
            n_max=Param("int", 10, "largest n"), phi_points=Param("int", 20, "phases per n"))
def _qufti_conj(p, seed, threads):
    phis = np.linspace(0, 2 * np.pi, p["phi_points"], endpoint=False) + 0.1
    for n in range(1, p["n_max"] + 1):
        diff = max(abs(fock.permanent_ryser(qufti.qufti_unitary(n, phi)) - qufti.conjectured_permanent(n, phi))
                   for phi in phis)
        yield n, diff


@experiment("sources", "Multiplexed heralded-source preparation probability",
            ["sources [1]", "prep_prob [1]", "parallel_fidelity [1]"],
            r=Param("float", 0.5, "squeezing"), eta=Param("float", 0.9, "detector efficiency"),
            n=Param("int", 20, "photons required"),
            N=Param("list[int]", [20, 50, 100, 150, 200, 300], "parallel sources"))
def _sources(p, seed, threads):
    fid = sources.herald_fidelity(p["r"], p["eta"], p["n"]).P_par
    for N in p["N"]:
        yield N, sources.multiplex_prep_prob(sources.SpdcParams(p["r"], p["eta"], N, p["n"])), fid


@experiment("fusion-rate", "Preparation rate of large Fock states by repeated fusion",
            ["d [photons]", "rate [1/fusion]", "ci_low [1/fusion]", "ci_high [1/fusion]"],
            strategy=Param("str", "balanced", "pair selection rule", fusion.STRATEGIES),
            d=Param("list[int]", [4, 8, 16], "targets"),
            steps=Param("int", 100000, "fusion operations per chain"),
            recycled=Param("bool", True, "keep every outcome"),
            unlimited_at=Param("int", 1, "photon number available on demand"))
def _fusion(p, seed, threads):
    for d in p["d"]:
        st = fusion.FusionStrategy(p["strategy"], d, recycled=p["recycled"], unlimited_at=p["unlimited_at"])
        r = fusion.run_strategy(st, p["steps"], make_rng(seed, d))
        yield d, r.rate, r.ci[0], r.ci[1]


@experiment("cat-hom", "Odd cat states on a balanced beamsplitter",
            ["alpha [1]", "amp_11 [1]", "amp_02 [1]", "amp_20 [1]"],
            alpha=Param("list[float]", [0.001, 0.1, 0.5, 1.0], "coherent amplitudes"))
def _cat_hom(p, seed, threads):
    H = fock.hadamard()
    for a in p["alpha"]:
        st = nonfock.CoherentSuperposition.cat(a, 2)
        yield (a,) + tuple(nonfock.cat_amplitude(st, H, S).real for S in ((1, 1), (0, 2), (2, 0)))


@experiment("spacs", "Photon-count statistics of photon-added coherent inputs",
            ["alpha_sq [1]", "p_all [1]", "p_none [1]", "regime [label]"],
            n=Param("int", 100, "added photons"),
            alpha_sq=Param("list[float]", [0.0, 0.001, 0.01, 0.1, 1.0, 10000.0], "|alpha|^2 values"))
def _spacs(p, seed, threads):
    for a2 in p["alpha_sq"]:
        s = nonfock.spacs_stats(p["n"], a2)
        yield a2, s.probs[-1], s.probs[0], s.regime


@experiment("passv", "Parity-pattern probabilities for photon-added squeezed vacuum",
            ["pattern [parity]", "probability [1]"],
            m=Param("int", 4, "modes"), n=Param("int", 2, "added photons"),
            xi=Param("float", 0.5, "squeezing"))
def _passv(p, seed, threads):
    O = fock.random_matrix(p["m"], "haar-orthogonal", make_rng(seed, 0))
    for S in sorted(set(tuple(sorted(c)) for c in product(range(p["m"]), repeat=p["n"]))):
        if len(set(S)) < p["n"]:
            continue
        par = ["odd" if j in S else "even" for j in range(p["m"])]
        yield "".join("1" if x == "odd" else "0" for x in par), nonfock.passv_sample(O, p["n"], par, p["xi"])


@experiment("integral-check", "Phase-space integral against the squared permanent",
            ["sample [1]", "integral [1]", "perm_sq [1]", "abs_diff [1]", "std_err [1]"],
            n=Param("int", 2, "photons"), m=Param("int", 4, "modes"),
            unitaries=Param("int", 5, "random networks"),
            method=Param("str", "quadrature", "integration method", ("quadrature", "monte-carlo")),
            budget=Param("int", 100000, "Monte-Carlo samples"))
def _integral(p, seed, threads):
    for k in range(p["unitaries"]):
        U = fock.random_matrix(p["m"], rng=make_rng(seed, 0, k))
        r = phasespace.integral_prob(U, p["n"], method=p["method"], budget=p["budget"], rng=make_rng(seed, 1, k))
        ref = abs(fock.permanent_ryser(U[:p["n"], :p["n"]])) ** 2
        yield k, r.value, ref, abs(r.value - ref), r.error


@experiment("walk", "Coined quantum walk with defects and dephasing",
            ["t [steps]", "variance [sites^2]", "variance_err [sites^2]", "escape [1]", "escape_err [1]"],
            t_max=Param("int", 20, "steps and lattice half-extent"),
            p=Param("float", 1.0, "probability a site is live"),
            p_d=Param("float", 0.0, "dephasing probability"),
            t_b=Param("int", 5, "escape boundary"),
            trials=Param("int", 10, "independent realisations"))
def _walk(p, seed, threads):
    e = walk.ensemble_run(p["t_max"], p["p"], p["p_d"], p["t_b"], p["trials"], seed, threads=threads)
    for row in zip(e.t, e.variance, e.variance_err, e.escape, e.escape_err):
        yield (int(row[0]),) + tuple(float(v) for v in row[1:])


@experiment("gkp", "Symmetric grid-state encoding from a spin ensemble",
            ["squeezing [dB]", "xi [1]", "J [hbar]", "J_exact [hbar]", "success_prob [1]",
             "sigma_q_sq [1]", "sigma_p_sq [1]"],
            s_db=Param("list[float]", [0.0, 4.0, 8.0, 12.0, 16.0, 20.0], "squeezing values"))
def _gkp(p, seed, threads):
    for s in p["s_db"]:
        xi = gkp.xi_from_db(s)
        enc = gkp.symmetric_encoding(xi)
        prm = gkp.SpinLightParams(enc.J, enc.g, xi)
        v = gkp.peak_variances(prm)
        yield s, xi, enc.J, enc.J_exact, gkp.success_prob(prm), v.q, v.p_exact


def list_experiments():
    """Machine-readable catalogue of every experiment and its parameters."""
    return [REGISTRY[k].schema() for k in sorted(REGISTRY)]
