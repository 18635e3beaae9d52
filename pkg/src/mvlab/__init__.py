"""mvlab: analytics and exemplar-based recommendation for MV layouts."""

from .analytics import (
    CoOccurrenceMatrix,
    TypeStats,
    aspect_ratio,
    compute_type_stats,
    conditional_probability,
    mean_position_by_type,
    position_grid,
    relative_position_change,
    stability,
    type_frequency,
    view_count_distribution,
)
from .annotation import (
    AnnotatedMV,
    annotation_from_design,
    escape_doi,
    normalize,
    parse_annotation,
    serialize_annotation,
)
from .encoding import (
    LayoutCode,
    LayoutCoder,
    LayoutRegistry,
    Leaf,
    Node,
    NonGuillotine,
    SlicingTree,
    canonical_signature,
    enumerate_signatures,
    layout_code,
    slicing_tree,
)
from .ingest import CorpusBundle, IngestReport, ingest, load_derived, save_derived
from .model import (
    AREA_EPS,
    GEOM_EPS,
    BBox,
    Corpus,
    Metadata,
    MVDesign,
    SmallMultiples,
    ValidationReport,
    View,
    ViewType,
    leaf_count,
    leaf_views,
    validate,
)
from .recommend import (
    MIConfig,
    MVRecommender,
    Recommendation,
    SketchView,
    UserSketch,
    align_views,
    apply_layout,
    composition_tensor,
    correlated_types,
    discretize,
    mutual_information,
    recommend,
    sketch_tensor,
)
from .refine import (
    AlignResult,
    GroupBox,
    LayoutRefiner,
    RefinementConfig,
    align_group,
    enclosing_box,
    groupable,
    neighbors,
    refine,
)
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "AREA_EPS",
    "AlignResult",
    "AnnotatedMV",
    "BBox",
    "CoOccurrenceMatrix",
    "Corpus",
    "CorpusBundle",
    "GEOM_EPS",
    "GroupBox",
    "IngestReport",
    "LayoutCode",
    "LayoutCoder",
    "LayoutRefiner",
    "LayoutRegistry",
    "Leaf",
    "MIConfig",
    "MVDesign",
    "MVRecommender",
    "Metadata",
    "Node",
    "NonGuillotine",
    "Recommendation",
    "RefinementConfig",
    "SketchView",
    "SlicingTree",
    "SmallMultiples",
    "TypeStats",
    "UserSketch",
    "ValidationReport",
    "View",
    "ViewType",
    "align_group",
    "align_views",
    "annotation_from_design",
    "apply_layout",
    "aspect_ratio",
    "canonical_signature",
    "composition_tensor",
    "compute_type_stats",
    "conditional_probability",
    "correlated_types",
    "create_app",
    "discretize",
    "enclosing_box",
    "enumerate_signatures",
    "escape_doi",
    "groupable",
    "ingest",
    "layout_code",
    "leaf_count",
    "leaf_views",
    "load_derived",
    "mean_position_by_type",
    "mutual_information",
    "neighbors",
    "normalize",
    "parse_annotation",
    "position_grid",
    "recommend",
    "refine",
    "relative_position_change",
    "save_derived",
    "serialize_annotation",
    "sketch_tensor",
    "slicing_tree",
    "stability",
    "type_frequency",
    "validate",
    "view_count_distribution",
]
