"""AP-free colorings of cyclic groups via randomized product blow-ups."""
from .constructions import (
    BlowupParams,
    ConstructionFailed,
    blowup,
    blowup_coloring,
    erdos_turan_set,
    fiber_union,
    mt_coloring,
    sparsify_coloring,
)
from .groups import TRIVIAL, CRTMap, Group, crt_flatten, cyclic, element_arith, product, project
from .pipeline import build_pipeline, plan_pipeline
from .progressions import APWitness, Coloring, find_ap_in_set, find_mono_ap, is_k_ap_free, make_ap

__version__ = "0.1.0"
