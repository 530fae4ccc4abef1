"""Spectral featurizer: two-channel 10-second segments to 72 band features.

Each segment carries two electrode channels sampled at fs >= 50 Hz. For the
three derived channels (first electrode, second electrode, their sample-wise
sum) and six fixed frequency bands, four quantities are emitted:

    absolute band power, relative band power (band / total over 0-25 Hz),
    band-limited signal variance, relative band variance.

Order is channel-major, band-minor, quantity-innermost: 3 * 6 * 4 = 72.
The power spectrum is a rectangular-window periodogram of the mean-removed
signal, scaled so the powers sum to the signal's population variance. Band
variances are computed independently by zeroing all out-of-band bins and
inverse-transforming, which under this normalization must reproduce the
band powers; the redundancy is a built-in cross-check on the pipeline.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import Dataset
from .errors import DimensionError, EmptyInputError, ParameterError, ParseError

SEGMENT_SECONDS = 10.0
MIN_SAMPLING_HZ = 50.0
TOTAL_BAND_HZ = 25.0
POWER_FLOOR = 1e-15

CHANNEL_NAMES = ("c3", "c4", "c3c4")
QUANTITY_NAMES = ("abspow", "relpow", "absvar", "relvar")


@dataclass(frozen=True)
class BandSpec:
    """Half-open frequency band (lo_hz, hi_hz]."""

    name: str
    lo_hz: float
    hi_hz: float

    def __post_init__(self):
        if not (0.0 <= self.lo_hz < self.hi_hz):
            raise ParameterError(f"band {self.name}: need 0 <= lo < hi")


DEFAULT_BANDS = (
    BandSpec("subdelta", 0.0, 1.5),
    BandSpec("delta", 1.5, 3.5),
    BandSpec("theta", 3.5, 7.5),
    BandSpec("alpha", 7.5, 13.5),
    BandSpec("beta1", 13.5, 19.5),
    BandSpec("beta2", 19.5, 25.0),
)


@dataclass(frozen=True)
class SegmentSignal:
    """One 10-second, two-channel segment of raw samples."""

    c3: np.ndarray
    c4: np.ndarray
    fs: float

    def __post_init__(self):
        c3 = np.asarray(self.c3, dtype=np.float64)
        c4 = np.asarray(self.c4, dtype=np.float64)
        object.__setattr__(self, "c3", c3)
        object.__setattr__(self, "c4", c4)
        if c3.ndim != 1 or c4.ndim != 1 or c3.shape != c4.shape:
            raise DimensionError("channels must be 1-D and equally long")
        if self.fs < MIN_SAMPLING_HZ:
            raise ParameterError(
                f"sampling rate {self.fs} Hz too low; need >= {MIN_SAMPLING_HZ} "
                f"to cover the {TOTAL_BAND_HZ} Hz top band edge"
            )
        expected = round(self.fs * SEGMENT_SECONDS)
        if c3.shape[0] != expected:
            raise DimensionError(
                f"segment length {c3.shape[0]} != fs * 10s = {expected} samples"
            )


class Psd(NamedTuple):
    freqs: np.ndarray
    power: np.ndarray


def periodogram(signal: np.ndarray, fs: float) -> Psd:
    """One-sided power spectrum whose entries sum to the signal variance.

    The mean is removed first; |DFT|^2 values are folded one-sided and
    scaled so sum(power) equals the population variance of the mean-removed
    signal (discrete Parseval identity).
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ParameterError("signal must be 1-D with at least 2 samples")
    if fs <= 0:
        raise ParameterError(f"fs must be > 0, got {fs}")
    n = x.shape[0]
    xc = x - x.mean()
    spec = np.fft.rfft(xc)
    power = np.abs(spec) ** 2 / n**2
    if n % 2 == 0:
        power[1:-1] *= 2.0
    else:
        power[1:] *= 2.0
    return Psd(freqs=np.fft.rfftfreq(n, 1.0 / fs), power=power)


def band_power(psd: Psd, band: BandSpec) -> float:
    """Sum of spectral power at frequencies in (lo_hz, hi_hz]."""
    if band.hi_hz > psd.freqs[-1] + 1e-9:
        raise ParameterError(
            f"band {band.name} reaches {band.hi_hz} Hz but the spectrum "
            f"stops at {psd.freqs[-1]:g} Hz"
        )
    mask = (psd.freqs > band.lo_hz) & (psd.freqs <= band.hi_hz)
    return float(psd.power[mask].sum())


def _band_limited_variance(signal: np.ndarray, fs: float, band: BandSpec) -> float:
    """Variance of the band's reconstructed component, via inverse DFT."""
    x = np.asarray(signal, dtype=np.float64)
    n = x.shape[0]
    xc = x - x.mean()
    spec = np.fft.rfft(xc)
    freqs = np.fft.rfftfreq(n, 1.0 / fs)
    keep = (freqs > band.lo_hz) & (freqs <= band.hi_hz)
    spec = np.where(keep, spec, 0.0)
    return float(np.var(np.fft.irfft(spec, n=n)))


def feature_names(bands: tuple[BandSpec, ...] = DEFAULT_BANDS) -> list[str]:
    """The 72 feature names in emission order, e.g. 'c3.alpha.relpow'."""
    return [
        f"{ch}.{band.name}.{qty}"
        for ch in CHANNEL_NAMES
        for band in bands
        for qty in QUANTITY_NAMES
    ]


def extract_features(
    seg: SegmentSignal, bands: tuple[BandSpec, ...] = DEFAULT_BANDS
) -> np.ndarray:
    """Compute the 72 spectral features of one segment.

    Relative quantities are normalized by the channel's total over the
    0-25 Hz range (power chain and variance chain each use their own
    total); when that total falls below 1e-15 the relative values are 0.
    """
    total_band = BandSpec("total", 0.0, TOTAL_BAND_HZ)
    channels = (seg.c3, seg.c4, seg.c3 + seg.c4)
    out = np.empty(len(channels) * len(bands) * len(QUANTITY_NAMES))
    pos = 0
    for ch in channels:
        psd = periodogram(ch, seg.fs)
        total_pow = band_power(psd, total_band)
        total_var = _band_limited_variance(ch, seg.fs, total_band)
        for band in bands:
            p = band_power(psd, band)
            v = _band_limited_variance(ch, seg.fs, band)
            out[pos] = p
            out[pos + 1] = p / total_pow if total_pow > POWER_FLOOR else 0.0
            out[pos + 2] = v
            out[pos + 3] = v / total_var if total_var > POWER_FLOOR else 0.0
            pos += 4
    return out


def read_signal_file(path) -> tuple[float, np.ndarray, np.ndarray]:
    """Parse a two-channel signal file.

    Line 1 holds the sampling rate (``fs=<value>`` or a bare number); every
    following non-empty line holds two samples (first channel, second
    channel), whitespace separated.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("signal file is empty", line=1)
    head = lines[0].strip()
    if head.startswith("fs="):
        head = head[3:]
    try:
        fs = float(head)
    except ValueError:
        raise ParseError(f"expected sampling rate, got '{lines[0]}'", line=1) from None
    c3, c4 = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 samples per line, found {len(parts)}", line=lineno)
        try:
            c3.append(float(parts[0]))
            c4.append(float(parts[1]))
        except ValueError:
            raise ParseError(f"non-numeric sample in '{line}'", line=lineno) from None
    return fs, np.asarray(c3), np.asarray(c4)


def segment_signal(fs: float, c3: np.ndarray, c4: np.ndarray) -> list[SegmentSignal]:
    """Chop a recording into consecutive 10-second segments; the trailing
    partial window is dropped."""
    n_per = round(fs * SEGMENT_SECONDS)
    n_full = len(c3) // n_per
    return [
        SegmentSignal(c3=c3[k * n_per : (k + 1) * n_per], c4=c4[k * n_per : (k + 1) * n_per], fs=fs)
        for k in range(n_full)
    ]


def signals_to_dataset(
    recordings: list[tuple[float, np.ndarray, np.ndarray]],
    class_labels_per_recording: list[str],
) -> Dataset:
    """Featurize recordings into the standard dataset layout.

    Each recording becomes one record (ids 1..n in input order) carrying
    its given class label; its 10-second segments become the rows.
    """
    if len(recordings) != len(class_labels_per_recording):
        raise ParameterError(
            f"{len(recordings)} recordings but "
            f"{len(class_labels_per_recording)} class labels"
        )
    feats, labels_raw, records = [], [], []
    for rec_id, (fs, c3, c4) in enumerate(recordings, start=1):
        segs = segment_signal(fs, c3, c4)
        if not segs:
            raise EmptyInputError(
                f"recording {rec_id} is shorter than one 10-second segment"
            )
        for seg in segs:
            feats.append(extract_features(seg))
            labels_raw.append(class_labels_per_recording[rec_id - 1])
            records.append(rec_id)

    distinct = sorted(set(labels_raw))
    try:
        distinct.sort(key=float)
    except ValueError:
        pass
    label_to_id = {lab: k + 1 for k, lab in enumerate(distinct)}
    y = np.asarray([label_to_id[lab] for lab in labels_raw], dtype=np.int64)
    return Dataset(
        X=np.vstack(feats),
        y=y,
        records=np.asarray(records, dtype=np.int64),
        feature_names=tuple(feature_names()),
        class_labels=tuple(distinct),
    )
