from commentary_align.synth.calibration import (
    calibrate_offset_sigma,
    construct_offsets,
    sample_offsets,
)
from commentary_align.synth.dataset import (
    DatasetManifest,
    load_split,
    read_manifest,
    write_dataset,
)
from commentary_align.synth.generator import (
    GroundTruthMap,
    SynthConfig,
    generate_match,
    hidden_map,
)
from commentary_align.synth.transcript import write_transcript

__all__ = [
    "DatasetManifest",
    "GroundTruthMap",
    "SynthConfig",
    "calibrate_offset_sigma",
    "construct_offsets",
    "generate_match",
    "hidden_map",
    "load_split",
    "read_manifest",
    "sample_offsets",
    "write_dataset",
    "write_transcript",
]
