"""Monte Carlo harness: SNR sweeps over the differential chain.

Each SNR point runs independent coherence blocks.  A block draws one
channel matrix, transmits the known identity reference frame, then
chains information frames differentially; the decoders track the scale
factor from their own decisions.  Blocks are the unit of parallelism:
every block derives its RNG stream from (seed, snr_index, block_index),
so results are bit-identical regardless of worker count, and early
stopping happens at fixed chunk boundaries for the same reason.

SNR convention: snr_db = 10*log10(n / noise_var), i.e. the nominal
received signal power per receive antenna (E(a^2) = n for unit-power
symbol alphabets) over the per-complex-entry noise variance.  noise_var
is therefore n / 10**(snr_db/10); "inf" gives a noiseless channel.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ._kernels import BACKEND, metric_scan
from .codebook import Codebook, NotGroupDecodableError, average_scale
from .design import construct_design
from .signalset import (
    PRESETS,
    construct_signal_set,
    default_radii,
    hyperbola_signal_set,
    preset_signal_set,
)

CSV_HEADER = "snr_db,decoder,frames,frame_errors,bler,bits,bit_errors,ber,metric_evals,seed"

SNR_CONVENTION = (
    "snr_db = 10*log10(n / noise_var); noise_var is the variance per complex "
    "noise entry (noise_var/2 per real dimension)"
)

#: Row order when decoder="both".
DECODER_ORDER = ("group", "exhaustive")


@dataclass(frozen=True)
class SimConfig:
    lam: int
    m: int
    family: str = "axis"
    radii: tuple[float, ...] | None = None
    preset: str | None = None
    c: float | None = None
    n_r: int = 1
    snr_db: tuple[float, ...] = (0.0,)
    frames: int = 1000
    target_errors: int | None = None
    coherence: int | None = None
    decoder: str = "group"
    seed: int = 0
    workers: int = 1

    def validate(self):
        if self.lam < 1:
            raise ValueError("lam must be >= 1")
        if self.family not in ("axis", "hyperbola"):
            raise ValueError(f"unknown signal family {self.family!r}")
        if self.family == "hyperbola" and self.lam != 2:
            raise ValueError("the circle-hyperbola family is defined for lam = 2 only")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        if not self.snr_db:
            raise ValueError("need at least one SNR point")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if self.target_errors is not None and self.target_errors < 1:
            raise ValueError("target_errors must be >= 1")
        if self.coherence is not None and self.coherence < 2:
            raise ValueError("coherence must be >= 2 (reference frame plus data)")
        if self.decoder not in ("group", "exhaustive", "both"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.n_r < 1:
            raise ValueError("n_r must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def decoders(self) -> tuple[str, ...]:
        if self.decoder == "both":
            return DECODER_ORDER
        return (self.decoder,)


@dataclass(frozen=True)
class SimPoint:
    snr_db: float
    decoder: str
    frames: int
    frame_errors: int
    bler: float
    bits: int
    bit_errors: int
    ber: float
    metric_evals: int
    wall_time_s: float


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    points: tuple[SimPoint, ...]
    backend: str = BACKEND
    snr_convention: str = SNR_CONVENTION

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER.split(","))
        for p in self.points:
            w.writerow([
                f"{p.snr_db:g}", p.decoder, p.frames, p.frame_errors,
                f"{p.bler:.6g}", p.bits, p.bit_errors, f"{p.ber:.6g}",
                p.metric_evals, self.config.seed,
            ])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def to_json(self) -> str:
        cfg = asdict(self.config)
        return json.dumps({
            "config": cfg,
            "backend": self.backend,
            "snr_convention": self.snr_convention,
            "results": [asdict(p) for p in self.points],
        }, indent=2)


def bit_mapping(idx, group_sizes):
    """Concatenated fixed-width binary encodings of the group indices.

    Widths are log2 of each group size; sizes that are not powers of two
    have no bit interpretation (the simulator then reports BLER only).
    """
    bits = []
    for i, size in zip(idx, group_sizes):
        w = int(size).bit_length() - 1
        if (1 << w) != size:
            raise ValueError(f"group size {size} is not a power of two; BER undefined")
        bits.extend(((int(i) >> (w - 1 - b)) & 1) for b in range(w))
    return bits


def noise_var_for_snr(snr_db: float, n: int) -> float:
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return n / (10.0 ** (snr_db / 10.0))


def build_codebook(cfg: SimConfig) -> Codebook:
    design = construct_design(cfg.lam)
    if cfg.preset is not None:
        plam, pradii = PRESETS[cfg.preset]
        if cfg.lam != plam:
            raise ValueError(f"preset {cfg.preset!r} is defined for lam={plam}, got lam={cfg.lam}")
        expected_m = (2 * len(pradii)) ** 4
        if cfg.m != expected_m:
            raise ValueError(f"preset {cfg.preset!r} implies M={expected_m}, got M={cfg.m}")
        sset = preset_signal_set(cfg.preset)
    elif cfg.family == "hyperbola":
        p = _fourth_root(cfg.m)
        radii = cfg.radii if cfg.radii is not None else default_radii(p // 2)
        c = cfg.c if cfg.c is not None else float(radii[0]) ** 2 / 4.0
        sset = hyperbola_signal_set(radii, c)
    else:
        sset = construct_signal_set(cfg.lam, cfg.m, radii=cfg.radii)
    return Codebook(design, sset)


def _fourth_root(m: int) -> int:
    from .signalset import fourth_root_points

    return fourth_root_points(m)


# ---------------------------------------------------------------------------
# Per-process state for worker tasks.  Codebook construction is pure, so a
# cache keyed by the defining fields keeps fork/spawn workers cheap.

_CB_CACHE: dict = {}


def _cached_chain(cfg_dict):
    key = tuple(sorted((k, v) for k, v in cfg_dict.items()
                       if k in ("lam", "m", "family", "radii", "preset", "c")))
    entry = _CB_CACHE.get(key)
    if entry is None:
        cfg = SimConfig(**cfg_dict)
        cb = build_codebook(cfg)
        sizes = np.asarray(cb.sizes, dtype=np.int64)
        strides = np.ones(4, dtype=np.int64)
        for k in range(2, -1, -1):
            strides[k] = strides[k + 1] * sizes[k + 1]
        try:
            widths = [int(s).bit_length() - 1 for s in sizes]
            if any((1 << w) != s for w, s in zip(widths, sizes)):
                widths = None
        except ValueError:
            widths = None
        entry = {
            "matrices": cb.matrices,
            "scales": cb.scales,
            "group_stacks": cb.group_stacks,
            "sizes": sizes,
            "strides": strides,
            "widths": widths,
            "n": cb.n,
            "group_decodable": cb.group_decodable,
        }
        _CB_CACHE[key] = entry
    return entry


def _run_blocks(entry, decoders, noise_var, n_r, seed, snr_idx, block_lo, block_hi,
                frames_per_block, total_frames):
    """Simulate blocks [block_lo, block_hi); returns integer counts."""
    mats = entry["matrices"]
    scales = entry["scales"]
    stacks = entry["group_stacks"]
    sizes = entry["sizes"]
    strides = entry["strides"]
    widths = entry["widths"]
    n = entry["n"]
    group_sizes = [s.shape[0] for s in stacks]
    evals_per_frame = {"exhaustive": mats.shape[0], "group": sum(group_sizes)}
    bits_per_frame = sum(widths) if widths is not None else 0
    sigma = math.sqrt(noise_var / 2.0) if noise_var > 0 else 0.0

    counts = {d: {"frames": 0, "frame_errors": 0, "bits": 0, "bit_errors": 0,
                  "metric_evals": 0} for d in decoders}

    for blk in range(block_lo, block_hi):
        nf = min(frames_per_block, total_frames - blk * frames_per_block)
        if nf <= 0:
            break
        rng = np.random.default_rng([seed, snr_idx, blk])
        z = rng.standard_normal((n, n_r, 2))
        h = np.ascontiguousarray((z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0))
        idx_draw = np.stack([rng.integers(0, sizes[k], nf) for k in range(4)])
        if sigma > 0.0:
            zw = rng.standard_normal((nf + 1, n, n_r, 2))
            noise = (zw[..., 0] + 1j * zw[..., 1]) * sigma
        else:
            noise = np.zeros((nf + 1, n, n_r), dtype=np.complex128)

        x_prev = np.eye(n, dtype=np.complex128)
        a_enc = 1.0
        r_prev = np.ascontiguousarray(h + noise[0])
        a_dec = {d: 1.0 for d in decoders}
        for t in range(nf):
            tx = idx_draw[:, t]
            lin = int(tx @ strides)
            x_t = (mats[lin] @ x_prev) / math.sqrt(a_enc)
            a_enc = float(scales[lin])
            r_t = np.ascontiguousarray(x_t @ h + noise[t + 1])
            for d in decoders:
                inv_a = 1.0 / math.sqrt(a_dec[d])
                if d == "exhaustive":
                    lin_hat, _ = metric_scan(mats, r_prev, r_t, inv_a)
                    lin_hat = int(lin_hat)
                else:
                    acc = 0
                    for k in range(4):
                        kbest, _ = metric_scan(stacks[k], r_prev, r_t, inv_a)
                        acc = acc * int(sizes[k]) + int(kbest)
                    lin_hat = acc
                a_dec[d] = float(scales[lin_hat])
                c = counts[d]
                c["frames"] += 1
                c["metric_evals"] += evals_per_frame[d]
                if lin_hat != lin:
                    c["frame_errors"] += 1
                if widths is not None:
                    c["bits"] += bits_per_frame
                    if lin_hat != lin:
                        rem_tx, rem_rx = lin, lin_hat
                        for k in range(3, -1, -1):
                            s = int(sizes[k])
                            c["bit_errors"] += ((rem_tx % s) ^ (rem_rx % s)).bit_count()
                            rem_tx //= s
                            rem_rx //= s
            r_prev = r_t
            x_prev = x_t
    return counts


def _chunk_worker(payload):
    cfg_dict, decoders, noise_var, snr_idx, lo, hi, fpb, total = payload
    entry = _cached_chain(cfg_dict)
    return _run_blocks(entry, decoders, noise_var, cfg_dict["n_r"], cfg_dict["seed"],
                       snr_idx, lo, hi, fpb, total)


def run_sim(cfg: SimConfig) -> SimResult:
    """Run the configured sweep and return exact integer counts per point.

    Deterministic for a fixed config: per-block RNG streams make the
    result independent of the worker count, and early stopping (when
    ``target_errors`` is set) only happens at fixed chunk boundaries.
    """
    cfg.validate()
    cfg_dict = asdict(cfg)
    entry = _cached_chain(cfg_dict)
    decoders = cfg.decoders()
    if any(d == "group" for d in decoders) and entry["group_decodable"] is not True:
        raise NotGroupDecodableError(
            "group decoding requested on a codebook that failed the decodability check"
        )
    frames_per_block = cfg.frames if cfg.coherence is None else cfg.coherence - 1
    n_blocks = math.ceil(cfg.frames / frames_per_block)
    chunk = max(1, math.ceil(n_blocks / 256))
    tasks = [
        (cfg_dict, decoders, None, None, lo, min(lo + chunk, n_blocks),
         frames_per_block, cfg.frames)
        for lo in range(0, n_blocks, chunk)
    ]

    points = []
    pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for snr_idx, snr in enumerate(cfg.snr_db):
            nv = noise_var_for_snr(snr, entry["n"])
            t0 = time.perf_counter()
            totals = {d: {"frames": 0, "frame_errors": 0, "bits": 0, "bit_errors": 0,
                          "metric_evals": 0} for d in decoders}
            payloads = [(c[0], c[1], nv, snr_idx, c[4], c[5], c[6], c[7]) for c in tasks]
            if pool is None:
                results = (_chunk_worker(p) for p in payloads)
            else:
                results = pool.map(_chunk_worker, payloads)
            for chunk_counts in results:
                for d in decoders:
                    for key in totals[d]:
                        totals[d][key] += chunk_counts[d][key]
                if cfg.target_errors is not None and all(
                    totals[d]["frame_errors"] >= cfg.target_errors for d in decoders
                ):
                    break
            wall = time.perf_counter() - t0
            for d in decoders:
                t = totals[d]
                bler = t["frame_errors"] / t["frames"] if t["frames"] else 0.0
                ber = t["bit_errors"] / t["bits"] if t["bits"] else float("nan")
                points.append(SimPoint(
                    snr_db=snr, decoder=d, frames=t["frames"],
                    frame_errors=t["frame_errors"], bler=bler, bits=t["bits"],
                    bit_errors=t["bit_errors"], ber=ber,
                    metric_evals=t["metric_evals"], wall_time_s=wall,
                ))
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return SimResult(config=cfg, points=tuple(points))


def codebook_summary(cfg: SimConfig) -> dict:
    """Static facts about the configured codebook (used by the CLI)."""
    cb = build_codebook(cfg)
    return {
        "n": cb.n,
        "M": cb.M,
        "rate_bits_per_use": cb.rate_bits_per_use,
        "avg_scale": average_scale(cb),
        "group_decodable": cb.group_decodable,
    }
