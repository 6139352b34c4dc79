"""End-to-end comparison: continuation-trained ternary codes vs a two-step baseline.

Per seed, both arms share one dataset and identical hyperparameters. The
continuation arm trains through the smoothed ternary activation while its
exponent sharpens; the baseline trains the same network with an identity hash
head and thresholds afterwards. Both encode the retrieval and query splits
with the same hard quantizer and are scored by the same mAP path.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from ..activation import ActivationConfig, ContinuationSchedule, schedule_k
from ..codes import pack, ternarize
from ..network import (
    Network,
    NetworkConfig,
    TrainConfig,
    hash_features,
    quantization_error,
    train,
)
from ..retrieval import RetrievalIndex, mean_ap
from .config import ExperimentConfig
from .data import Dataset, gen_synthetic, load_splits, single_labels


def encode_dataset(net: Network, features) -> list:
    """Hash, threshold at the network's alpha, and pack each row."""
    alpha = net.config.activation.alpha
    return [pack(ternarize(row, alpha)) for row in hash_features(net, features)]


@dataclass(frozen=True)
class TwoStepResult:
    network: Network
    logs: list
    retrieval_codes: list
    query_codes: list


def two_step_baseline(dataset: Dataset, net_cfg: NetworkConfig, train_cfg: TrainConfig) -> TwoStepResult:
    """Learn features with an identity hash head, then threshold them into codes."""
    feats, label_sets = dataset.subset(dataset.train_ids)
    net, logs = train(net_cfg, train_cfg, feats, single_labels(label_sets), ternary=False)
    return TwoStepResult(
        network=net,
        logs=logs,
        retrieval_codes=encode_dataset(net, dataset.subset(dataset.retrieval_ids)[0]),
        query_codes=encode_dataset(net, dataset.subset(dataset.query_ids)[0]),
    )


@dataclass(frozen=True)
class SeedResult:
    seed: int
    stage_epochs: tuple
    stage_ks: tuple
    stage_quant_errors: tuple
    continuation_map: float
    two_step_map: float
    two_step_quant_error: float
    continuation_logs: list
    two_step_logs: list


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    seed_results: list
    median_continuation_map: float
    median_two_step_map: float


def _stage_end_epochs(schedule: ContinuationSchedule, epochs: int) -> list:
    """Last epoch of each constant-k stretch within the run."""
    ends = []
    for epoch in range(epochs):
        if epoch == epochs - 1 or schedule_k(epoch + 1, schedule) != schedule_k(epoch, schedule):
            ends.append(epoch)
    return ends


def _dataset_for_seed(cfg: ExperimentConfig, seed: int) -> Dataset:
    if cfg.data_prefix is not None:
        return load_splits(cfg.data_prefix)
    return gen_synthetic(
        cfg.classes,
        cfg.per_class,
        cfg.input_dim,
        cfg.spread,
        seed,
        query_fraction=cfg.query_fraction,
        train_fraction=cfg.train_fraction,
    )


def run_seed(cfg: ExperimentConfig, seed: int) -> SeedResult:
    """Train and evaluate both arms for one seed."""
    dataset = _dataset_for_seed(cfg, seed)
    net_cfg = NetworkConfig(
        input_dim=dataset.input_dim,
        hidden_dims=cfg.hidden_dims,
        code_dim=cfg.code_dim,
        num_classes=dataset.num_classes,
        activation=ActivationConfig(alpha=cfg.alpha, k=cfg.k_start),
        seed=seed,
    )
    schedule = ContinuationSchedule(
        k_start=cfg.k_start, k_end=cfg.k_end, stride_epochs=cfg.stride_epochs, total_epochs=cfg.epochs
    )
    train_cfg = TrainConfig(
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        lr0=cfg.lr0,
        momentum=cfg.momentum,
        weight_decay=cfg.weight_decay,
        schedule=schedule,
    )
    train_feats, train_label_sets = dataset.subset(dataset.train_ids)
    retrieval_feats, retrieval_labels = dataset.subset(dataset.retrieval_ids)
    query_feats, query_labels = dataset.subset(dataset.query_ids)

    stage_ends = _stage_end_epochs(schedule, cfg.epochs)
    stage_errors = {}

    def snapshot(net, entry):
        if entry.epoch in stage_ends:
            stage_errors[entry.epoch] = (entry.k, quantization_error(net, retrieval_feats, entry.k))

    cont_net, cont_logs = train(
        net_cfg, train_cfg, train_feats, single_labels(train_label_sets), ternary=True, epoch_hook=snapshot
    )
    cont_index = RetrievalIndex(codes=encode_dataset(cont_net, retrieval_feats), labels=retrieval_labels)
    cont_report = mean_ap(cont_index, encode_dataset(cont_net, query_feats), query_labels, cfg.eval_k)

    base = two_step_baseline(dataset, net_cfg, train_cfg)
    base_index = RetrievalIndex(codes=base.retrieval_codes, labels=retrieval_labels)
    base_report = mean_ap(base_index, base.query_codes, query_labels, cfg.eval_k)

    return SeedResult(
        seed=seed,
        stage_epochs=tuple(stage_ends),
        stage_ks=tuple(stage_errors[e][0] for e in stage_ends),
        stage_quant_errors=tuple(stage_errors[e][1] for e in stage_ends),
        continuation_map=cont_report.map,
        two_step_map=base_report.map,
        two_step_quant_error=quantization_error(base.network, retrieval_feats, None),
        continuation_logs=cont_logs,
        two_step_logs=base.logs,
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Both arms across all seeds, plus the across-seed medians."""
    results = [run_seed(cfg, seed) for seed in cfg.seeds]
    return ExperimentResult(
        config=cfg,
        seed_results=results,
        median_continuation_map=statistics.median(r.continuation_map for r in results),
        median_two_step_map=statistics.median(r.two_step_map for r in results),
    )


def format_experiment_report(result: ExperimentResult) -> str:
    """Plain-text comparison table; byte-stable for a fixed config."""
    cfg = result.config
    dataset = cfg.data_prefix if cfg.data_prefix is not None else (
        f"synthetic classes={cfg.classes} per_class={cfg.per_class} "
        f"input_dim={cfg.input_dim} spread={cfg.spread!r}"
    )
    lines = [
        "continuation vs two-step ternary hashing",
        f"dataset: {dataset}",
        f"code_dim={cfg.code_dim} alpha={cfg.alpha!r} k={cfg.k_start}..{cfg.k_end} "
        f"stride={cfg.stride_epochs} epochs={cfg.epochs} eval_k={cfg.eval_k}",
        "",
    ]
    for r in result.seed_results:
        lines.append(f"seed {r.seed}")
        for epoch, k, err in zip(r.stage_epochs, r.stage_ks, r.stage_quant_errors):
            lines.append(f"  stage k={k:<2d} end_epoch={epoch:<3d} quant_error={err:.6f}")
        lines.append(f"  two-step     final quant_error={r.two_step_quant_error:.6f}")
        lines.append(f"  continuation mAP {r.continuation_map:.6f}")
        lines.append(f"  two-step     mAP {r.two_step_map:.6f}")
        lines.append("")
    lines.append(f"median continuation mAP {result.median_continuation_map:.6f}")
    lines.append(f"median two-step     mAP {result.median_two_step_map:.6f}")
    return "\n".join(lines) + "\n"
