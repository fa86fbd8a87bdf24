"""Network-based high-level classification with per-attribute networks (Quipus)."""

from .dataset import Dataset, load_csv, min_max_normalize, stratified_kfold, stratified_split
from .ensemble import (NetworkBundle, QuipusModel, build_bundle, filter_by_modularity,
                       load_model, predict, probability_tensor, save_model, train,
                       weighted_predict)
from .graph import LabeledGraph, OverlayInsertion
from .hlnb import HlnbParams, classify
from .measures import betweenness, clustering_coefficient, modularity
from .netbuild import BuildParams, InsertionReport, build_network, insertion_links
from .pso import PsoParams, grid_search, optimize

__version__ = "0.1.0"
