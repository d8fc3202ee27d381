"""Sub-phonemic evaluation of phone recognition results.

Align hypotheses to references, tabulate confusion matrices, score manner,
place and voicing errors and the distinctive-feature distance, render
grey-scale matrices and prepare white-noise stimuli at set SNRs.
"""

from .align import Alignment, EditTally, Op, Step, align, error_rate, tally
from .confmat import (
    ConfusionMatrix,
    build_from_alignments,
    read_matrix_csv,
    reorder_canonical,
    row_normalize,
    write_matrix_csv,
)
from .errors import (
    ParseError,
    SubphonError,
    UndefinedRateError,
    UnknownPhoneError,
    ValidationError,
)
from .metrics import (
    ErrorReport,
    NRPolicy,
    df_distance,
    feature_error_rates,
    overall_error,
    snr_report,
)
from .noisemix import AudioBuffer, SnrSpec, batch_mix, measure_rms, mix_white_noise
from .phoneset import (
    MASTER_ORDER,
    NR,
    CategoryScheme,
    FeatureTable,
    FeatureValue,
    canonical_order,
    classify,
    default_feature_table,
    default_scheme,
    feature_distance,
    load_feature_table,
    load_scheme,
)
from .render import GreyImage, emit_curves, render_matrix, write_pgm

__version__ = "0.1.0"
