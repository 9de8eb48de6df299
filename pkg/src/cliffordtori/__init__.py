from ._errors import (
    InvalidDimensionError,
    InvalidLabelError,
    InvalidProbabilityError,
    InvalidMatrixError,
    NotBistochasticError,
    NotUnistochasticError,
    OutOfSectionError,
    NonConvergedError,
    ChartFailureError,
    NotAnIntersectionError,
    ContinuumError,
    UnknownFigureError,
)

from ._config import SolverConfig

from ._matcore import (
    CliffordTorusPoint,
    DephaseResult,
    ExtendedEuclidResult,
    affine_coordinates,
    check_unitary,
    clifford_torus_coordinates,
    dephase,
    extended_euclid,
    fourier_matrix,
    haar_random_unitary,
    induced_metric,
    is_odd_prime,
    is_unitary,
    modular_inverse,
    mub_circulant_vector,
    torus_area_density,
    torus_image,
    unistochastic_projection,
    van_der_waerden,
)

from ._birkhoff import (
    DECOMPOSITION_KERNEL,
    EVEN_PERMUTATIONS,
    PERMUTATIONS,
    CrossSectionSpec,
    UnistochasticCertificate,
    bistochastic_distance,
    cross_section_point,
    facet_vertices,
    is_unistochastic,
    permutation_decomposition,
    polytope_edges,
    reconstruct_unitary,
    sample_birkhoff,
    section_boundary_trace,
    unistochastic_margin,
)

from ._topology import (
    IndexedPoint,
    IndexReport,
    MubIndexRow,
    TangentFrame,
    fourier_mub_index_table,
    frame_determinant,
    gauss_sum,
    index_report,
    intersection_index,
    legendre_symbol,
    mub_tangent_frame,
    quadratic_residues,
    tangent_frame,
)

from ._intersect import (
    CONTINUUM,
    Classification,
    IntersectionPoint,
    IntersectionSet,
    ScanCell,
    canonical_phases,
    count_intersections,
    find_intersections,
    grid_count,
    residual,
    residual_jacobian,
    scan_section,
    torus_distance,
)

from ._families import (
    FamilySweepRow,
    StandardFormParameters,
    family_fixed_points,
    family_intersections_analytic,
    family_sweep,
    interpolating_family,
    standard_form,
    standard_form_dimension,
    standard_form_parameters,
)

from ._experiments import (
    FIGURES,
    PARABOLIC_PATHS,
    ExperimentReport,
    FigureTable,
    Table1Row,
    figure_data,
    parabolic_chart,
    path_trajectory,
    table1_experiment,
    table2_experiment,
    volume_experiment,
)

from ._io import (
    index_report_to_dict,
    intersection_set_to_dict,
    matrix_from_dict,
    matrix_to_dict,
    read_matrix_json,
    write_csv,
    write_json,
    write_matrix_json,
)
