"""Seeded Monte Carlo runner for every coding scheme.

Each trial ``t`` draws from three independent streams, keyed on
``(seed, stream, t)``: the codebook, the source/state/message, and the
channel noise.  With ``fixed_codebook`` the codebook stream ignores ``t``.
Results are aggregated in trial order, so the statistics do not depend on
how many worker threads ran the trials.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from ._seeding import derive_seed
from .core import CapacityError, search_cap
from .multiterminal import BroadcastCode, DirtyPaperCode, MacCornerCode, WynerZivCode
from .p2p import SparcChannelCode, SparcQuantizer, awgn, distortion
from .theory import to_bits

SCHEMES = ("rd", "awgn", "wz", "dpc", "mac", "bc")

CODEBOOK_STREAM = 0
SOURCE_STREAM = 1
NOISE_STREAM = 2

CSV_COLUMNS = (
    "scheme", "n", "M", "L", "Mprime", "realized_R1", "realized_R2", "param_json",
    "trials", "mean_distortion", "distortion_se", "exceedance_rate", "block_error_rate",
    "per_section_error_rate", "mean_power", "seed", "wall_ms",
)

# model parameters each scheme reads, in param_json order
SCHEME_PARAMS = {
    "rd": ("sigma2", "dist"),
    "awgn": ("power", "noise"),
    "wz": ("sigma2", "noise", "dist"),
    "dpc": ("power", "noise", "state_var", "alpha"),
    "mac": ("power", "noise", "M2", "L2"),
    "bc": ("power", "noise", "noise2", "alpha", "M2", "L2"),
}


@dataclass
class ExperimentConfig:
    """One simulation point: a scheme, its model, its layout and the trial budget.

    For ``mac`` and ``bc`` the pair ``(M, L)`` describes user 1 and
    ``(M2, L2)`` user 2 (defaulting to user 1's values).  For ``bc``,
    ``noise`` is the stronger receiver's variance and ``noise2`` the weaker
    one's; ``alpha`` is user 1's power share.  For ``dpc`` an unset
    ``alpha`` means ``power / (power + noise)``.
    """

    scheme: str
    n: int
    M: int
    L: int
    m_prime: Optional[int] = None
    M2: Optional[int] = None
    L2: Optional[int] = None
    sigma2: float = 1.0
    noise: float = 1.0
    noise2: Optional[float] = None
    power: float = 1.0
    state_var: float = 1.0
    dist: float = 0.25
    alpha: Optional[float] = None
    trials: int = 100
    seed: int = 0
    fixed_codebook: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be an integer >= 1, got {self.trials!r}")
        if isinstance(self.workers, bool) or not isinstance(self.workers, int) or self.workers < 1:
            raise ValueError(f"workers must be an integer >= 1, got {self.workers!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.scheme in ("wz", "dpc") and self.m_prime is None:
            raise ValueError(f"scheme {self.scheme!r} requires m_prime (M')")
        if self.scheme in ("mac", "bc"):
            if self.M2 is None:
                self.M2 = self.M
            if self.L2 is None:
                self.L2 = self.L
        if self.scheme == "bc":
            if self.noise2 is None:
                self.noise2 = self.noise
            if self.alpha is None:
                self.alpha = 0.5

    def model_params(self) -> dict:
        return {k: getattr(self, k) for k in SCHEME_PARAMS[self.scheme]}

    def make_codec(self, random_state: int):
        s = self.scheme
        if s == "rd":
            return SparcQuantizer(self.n, self.M, self.L, self.sigma2, self.dist, random_state)
        if s == "awgn":
            return SparcChannelCode(self.n, self.M, self.L, self.power, self.noise, random_state)
        if s == "wz":
            return WynerZivCode(
                self.n, self.M, self.L, self.m_prime, self.sigma2, self.noise, self.dist,
                random_state,
            )
        if s == "dpc":
            return DirtyPaperCode(
                self.n, self.M, self.L, self.m_prime, self.power, self.noise, self.state_var,
                self.alpha, random_state,
            )
        if s == "mac":
            return MacCornerCode(
                self.n, self.M, self.L, self.M2, self.L2, self.power, self.noise, random_state
            )
        return BroadcastCode(
            self.n, self.M, self.L, self.M2, self.L2, self.power, self.noise, self.noise2,
            self.alpha, random_state,
        )

    def search_sizes(self) -> list:
        if self.scheme in ("mac", "bc"):
            return [self.M**self.L, self.M2**self.L2]
        return [self.M**self.L]


@dataclass
class TrialStats:
    """Aggregates over the trials of one experiment.

    Fields that do not apply to a scheme are ``None`` (for example
    distortions for pure channel codes).  Standard errors are the sample
    standard deviation over trials divided by ``sqrt(trials)``.
    """

    scheme: str
    n: int
    M: int
    L: int
    Mprime: Optional[int]
    realized_R1: float
    realized_R2: Optional[float]
    param_json: str
    trials: int
    mean_distortion: Optional[float]
    distortion_se: Optional[float]
    exceedance_rate: Optional[float]
    block_error_rate: Optional[float]
    per_section_error_rate: Optional[float]
    mean_power: Optional[float]
    seed: int
    wall_ms: Optional[float] = field(default=None, compare=False)
    exceedance_se: Optional[float] = None
    block_error_se: Optional[float] = None
    per_section_error_se: Optional[float] = None
    power_se: Optional[float] = None

    def interval(self, name: str, width: float = 2.0) -> tuple:
        """``(mean - width*se, mean + width*se)`` for a rate or mean field."""
        se_name = {
            "mean_distortion": "distortion_se",
            "exceedance_rate": "exceedance_se",
            "block_error_rate": "block_error_se",
            "per_section_error_rate": "per_section_error_se",
            "mean_power": "power_se",
        }[name]
        mean, se = getattr(self, name), getattr(self, se_name)
        return mean - width * se, mean + width * se


def _trial_seeds(config: ExperimentConfig, t: int):
    book = (
        derive_seed(config.seed, CODEBOOK_STREAM)
        if config.fixed_codebook
        else derive_seed(config.seed, CODEBOOK_STREAM, t)
    )
    return book, derive_seed(config.seed, SOURCE_STREAM, t), derive_seed(config.seed, NOISE_STREAM, t)


def _power(x) -> float:
    return float(np.mean(np.asarray(x) ** 2))


def _run_trial(config: ExperimentConfig, codec, t: int) -> dict:
    book_seed, src_seed, noise_seed = _trial_seeds(config, t)
    if codec is None:
        codec = config.make_codec(book_seed).fit()
    src = np.random.default_rng(src_seed)
    res = dict(distortion=None, exceed=None, block_error=None, section_error=None, power=None)
    s = config.scheme

    if s == "rd":
        x = math.sqrt(config.sigma2) * src.standard_normal((1, config.n))
        xhat = codec.inverse_transform(codec.transform(x))
        d = distortion(x, xhat)
        res.update(distortion=d, exceed=d > config.dist)

    elif s == "awgn":
        m = codec.sample_messages(1, src)
        x = codec.encode(m)
        m_hat = codec.predict(awgn(x, config.noise, noise_seed))
        res.update(
            block_error=bool(np.any(m_hat != m)),
            section_error=float(np.mean(m_hat != m)),
            power=_power(x),
        )

    elif s == "wz":
        x = math.sqrt(config.sigma2) * src.standard_normal((1, config.n))
        y = awgn(x, config.noise, noise_seed)
        beta = codec.quantize(x)
        bins = np.array([beta[0] // codec.nest_.m_prime])
        beta_hat = codec.decode_codeword(bins, y)
        xhat = codec.combine(codec.codewords(beta_hat), y)
        d = distortion(x, xhat)
        res.update(
            distortion=d,
            exceed=d > config.dist,
            block_error=bool(np.any(beta_hat != beta)),
            section_error=float(np.mean(beta_hat != beta)),
        )

    elif s == "dpc":
        m = codec.sample_bins(1, src)
        state = math.sqrt(config.state_var) * src.standard_normal((1, config.n))
        beta = codec.quantize(m, state)
        U = codec.codewords(beta)
        x = U - codec.params_.alpha * state
        m_hat = codec.predict(awgn(x + state, config.noise, noise_seed))
        d = distortion(state, codec.params_.kappa * U)
        res.update(
            distortion=d,
            exceed=d > codec.params_.quantizer_distortion,
            block_error=bool(np.any(m_hat != m)),
            section_error=float(np.mean(m_hat != m)),
            power=_power(x),
        )

    elif s == "mac":
        m1, m2 = codec.sample_messages(1, src)
        X1, X2 = codec.encode(m1, m2)
        h1, h2 = codec.predict(awgn(X1 + X2, config.noise, noise_seed))
        wrong = np.concatenate([(h1 != m1).ravel(), (h2 != m2).ravel()])
        res.update(
            block_error=bool(wrong.any()),
            section_error=float(wrong.mean()),
            power=0.5 * (_power(X1) + _power(X2)),
        )

    else:  # bc
        m1, m2 = codec.sample_messages(1, src)
        x = codec.encode(m1, m2)
        h1, h2 = codec.transmit(m1, m2, (derive_seed(noise_seed, 1), derive_seed(noise_seed, 2)))
        wrong = np.concatenate([(h1 != m1).ravel(), (h2 != m2).ravel()])
        res.update(
            block_error=bool(wrong.any()),
            section_error=float(wrong.mean()),
            power=_power(x),
        )
    return res


def _mean_se(values):
    if values[0] is None:
        return None, None
    arr = np.asarray(values, dtype=float)
    se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return float(arr.mean()), se


def run_experiment(config: ExperimentConfig) -> TrialStats:
    """Run ``config.trials`` independent trials and aggregate them.

    Raises
    ------
    CapacityError
        If a search in this configuration would exceed the search cap.
    """
    cap = search_cap()
    for size in config.search_sizes():
        if size > cap:
            raise CapacityError(
                f"{config.scheme}: exhaustive search over {size} patterns "
                f"(n={config.n}, M={config.M}, L={config.L}) exceeds the cap of {cap}"
            )
    start = time.perf_counter()
    # validates the model and layout before any trial runs
    probe = config.make_codec(derive_seed(config.seed, CODEBOOK_STREAM)).fit()
    codec = probe if config.fixed_codebook else None

    if config.workers == 1:
        results = [_run_trial(config, codec, t) for t in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda t: _run_trial(config, codec, t), range(config.trials)))

    cols = {k: [r[k] for r in results] for k in results[0]}
    mean_d, se_d = _mean_se(cols["distortion"])
    exceed, exceed_se = _mean_se(cols["exceed"])
    block, block_se = _mean_se(cols["block_error"])
    section, section_se = _mean_se(cols["section_error"])
    power, power_se = _mean_se(cols["power"])

    if config.scheme in ("wz", "dpc"):
        r1, r2 = probe.nest_.outer_rate, probe.nest_.inner_rate
    elif config.scheme in ("mac", "bc"):
        r1, r2 = probe.rates_
    else:
        r1, r2 = probe.rate_, None

    return TrialStats(
        scheme=config.scheme,
        n=config.n,
        M=config.M,
        L=config.L,
        Mprime=config.m_prime if config.scheme in ("wz", "dpc") else None,
        realized_R1=r1,
        realized_R2=r2,
        param_json=json.dumps(config.model_params(), sort_keys=True),
        trials=config.trials,
        mean_distortion=mean_d,
        distortion_se=se_d,
        exceedance_rate=exceed,
        block_error_rate=block,
        per_section_error_rate=section,
        mean_power=power,
        seed=config.seed,
        wall_ms=(time.perf_counter() - start) * 1e3,
        exceedance_se=exceed_se,
        block_error_se=block_se,
        per_section_error_se=section_se,
        power_se=power_se,
    )


def _row(stats: TrialStats, bits: bool, timing: bool) -> dict:
    row = {k: getattr(stats, k) for k in CSV_COLUMNS}
    if bits:
        for k in ("realized_R1", "realized_R2"):
            if row[k] is not None:
                row[k] = to_bits(row[k])
    if not timing:
        row["wall_ms"] = None
    return row


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_stats(stats, fmt: str = "csv", bits: bool = False, timing: bool = False) -> bytes:
    """Encode one or more :class:`TrialStats` as CSV or JSON.

    Both formats carry exactly the columns of ``CSV_COLUMNS`` in that order.
    Missing values are empty CSV cells and JSON ``null``.  ``wall_ms`` is left
    empty unless ``timing`` is set, so repeated runs produce identical bytes.
    ``bits`` converts the realized rates from nats to bits.
    """
    if isinstance(stats, TrialStats):
        stats = [stats]
    rows = [_row(s, bits, timing) for s in stats]
    if fmt == "json":
        return (json.dumps(rows, indent=2) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in CSV_COLUMNS])
    return buf.getvalue().encode()


_INT_COLUMNS = {"n", "M", "L", "Mprime", "trials", "seed"}
_STR_COLUMNS = {"scheme", "param_json"}


def parse_stats(data: bytes, fmt: str = "csv") -> list:
    """Inverse of :func:`serialize_stats`: a list of column dicts."""
    text = data.decode()
    if fmt == "json":
        return json.loads(text)
    if fmt != "csv":
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError("CSV header does not match the documented columns")
    rows = []
    for record in reader:
        row = {}
        for key, cell in zip(header, record):
            if cell == "":
                row[key] = None
            elif key in _STR_COLUMNS:
                row[key] = cell
            elif key in _INT_COLUMNS:
                row[key] = int(cell)
            else:
                row[key] = float(cell)
        rows.append(row)
    return rows


def config_fields() -> tuple:
    return tuple(f.name for f in fields(ExperimentConfig))


def config_to_dict(config: ExperimentConfig) -> dict:
    return asdict(config)
