"""Shipped example inputs: the EVCS data-flow diagram and the DoS attack tree / HMM."""

from __future__ import annotations

from importlib import resources

from .hmm import HmmModel, count_corpus, load_model, save_model, train
from .planner import MonitoringModel
from .sim import generate_corpus
from .threats import DfdModel, load_dfd
from .tree import AttackDefenseTree, parse_tree

# hidden-state order used by the case study
DOS_STATES = ("M", "P", "NF", "A", "ML", "MI", "FM", "AF")
DOS_ALERT_MAP = {
    "NF": "NB", "M": "NB", "P": "NB", "A": "NB",
    "ML": "SR", "MI": "SR", "FM": "SR", "AF": "SR",
}
# generator settings the shipped dos.hmm was trained with
DOS_TRAINING = {"episodes": 5000, "seed": 2024, "false_negative": 0.05, "confusion": 0.1, "kappa": 0.1}


def read_data(name: str) -> str:
    return resources.files("evcsguard").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def data_path(name: str) -> str:
    return str(resources.files("evcsguard").joinpath("data").joinpath(name))


def dos_tree() -> AttackDefenseTree:
    return parse_tree(read_data("dos.adt"), "dos.adt")


def evcs_dfd() -> DfdModel:
    return load_dfd(read_data("evcs.dfd"), "evcs.dfd")


def dos_monitoring(noisy: bool = True) -> MonitoringModel:
    if not noisy:
        return MonitoringModel(DOS_ALERT_MAP)
    return MonitoringModel(DOS_ALERT_MAP, DOS_TRAINING["false_negative"], DOS_TRAINING["confusion"])


def build_dos_model() -> HmmModel:
    """Regenerate the DoS HMM from the attacker generator."""
    corpus = generate_corpus(
        dos_tree(), dos_monitoring(), DOS_TRAINING["episodes"], DOS_TRAINING["seed"], states=DOS_STATES
    )
    return train(count_corpus(corpus), DOS_TRAINING["kappa"])


def dos_model() -> HmmModel:
    return load_model(read_data("dos.hmm"), "dos.hmm")


if __name__ == "__main__":  # regenerate data/dos.hmm
    print(save_model(build_dos_model()), end="")
