"""Pre-trained model banks covering missing-measurement scenarios.

When up to k_max of the N generator feeds can drop out, every admissible
missing set gets its own localizer and magnitude models, trained offline on
the same dataset with those generators' feature blocks removed. At run time
the observed-generator set selects the matching entry, so losing a feed costs
a dictionary lookup instead of a retrain. The bank holds
sum_{j=0}^{k_max} C(N, j) localizers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .features import FeatureConfig, canonical_mask, extract, featurize_dataset
from .localizer import (LocalizationPrediction, LogisticModel, OptimizerSettings,
                        predict, train_localizer)
from .magnitude import (LinearModelBank, MagnitudeSettings, estimate_magnitude,
                        merge_banks, train_bank)
from .model import FrequencyTrace
from .simulate import TraceDataset


def enumerate_masks(generator_count: int, k_max: int) -> tuple[tuple[int, ...], ...]:
    """All canonical missing sets of size 0..k_max, smallest first."""
    if not 0 <= k_max < generator_count:
        raise ValueError(f"k_max must lie in 0..{generator_count - 1}")
    masks = []
    for size in range(k_max + 1):
        masks.extend(itertools.combinations(range(1, generator_count + 1), size))
    return tuple(masks)


@dataclass(frozen=True)
class ScenarioBank:
    """One localizer per admissible missing set, plus magnitude models."""

    localizers: dict[tuple[int, ...], LogisticModel]
    magnitudes: LinearModelBank
    k_max: int
    feature_config: FeatureConfig

    @property
    def generator_count(self) -> int:
        lengths = {len(mask) + self._observed(mask) for mask in self.localizers}
        return max(lengths)

    def _observed(self, mask):
        model = self.localizers[mask]
        return (model.feature_dimension - 1) // self.feature_config.block_length


def build_bank(dataset: TraceDataset, config: FeatureConfig, k_max: int,
               lam: float, bus_count: int | None = None,
               settings: OptimizerSettings = OptimizerSettings(),
               magnitude_settings: MagnitudeSettings = MagnitudeSettings(),
               generator_count: int | None = None) -> ScenarioBank:
    """Train the full bank over every missing set of size up to k_max."""
    if not dataset.traces:
        raise ValueError("dataset is empty")
    n = generator_count or dataset.traces[0].generator_count
    localizers = {}
    banks = []
    for mask in enumerate_masks(n, k_max):
        samples = featurize_dataset(dataset, config, mask)
        localizers[mask] = train_localizer(samples, lam, settings, bus_count=bus_count)
        banks.append(train_bank(samples, settings=magnitude_settings))
    return ScenarioBank(localizers=localizers, magnitudes=merge_banks(banks),
                        k_max=k_max, feature_config=config)


def predict_with_missing(bank: ScenarioBank, trace: FrequencyTrace,
                         observed) -> tuple[LocalizationPrediction, float]:
    """Localize and size a disturbance from the generators still reporting.

    ``observed`` lists the generator ids with live measurements; the rest
    form the missing set, which must not exceed the bank's budget. The
    magnitude is conditioned on the predicted bus and is 0 when the
    prediction is the no-disturbance class.
    """
    observed = set(canonical_mask(observed))
    every = set(range(1, trace.generator_count + 1))
    unknown = observed - every
    if unknown:
        raise ValueError(f"observed names unknown generators {sorted(unknown)}")
    mask = canonical_mask(every - observed)
    if len(mask) > bank.k_max:
        raise ValueError(f"{len(mask)} generators missing exceeds the bank "
                         f"budget k_max = {bank.k_max}")
    if mask not in bank.localizers:
        raise KeyError(f"bank has no entry for missing set {mask}")

    features = extract(trace, bank.feature_config, mask)
    localization = predict(bank.localizers[mask], features)
    if localization.predicted == 0:
        return localization, 0.0
    return localization, estimate_magnitude(bank.magnitudes, localization.predicted,
                                            mask, features)
