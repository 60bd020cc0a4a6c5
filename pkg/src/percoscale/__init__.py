"""Percolation samplers and multi-scale renormalization diagnostics."""

from .graphs import (
    Graph,
    GeometryProfile,
    gen_graph,
    torus,
    box,
    cycle,
    ladder,
    complete,
    ball,
    sphere,
    boundary,
    set_diameter,
    growth_profile,
    check_isoperimetry,
    find_geodesic_segment,
    parse_adjacency,
    format_adjacency,
)
from .models import (
    SiteConfig,
    BondConfig,
    ConstantSiteConfig,
    ClusterLabeling,
    Loop,
    LoopSoupRealization,
    sample_bernoulli_site,
    sample_bernoulli_bond,
    clusters,
    divide_and_color,
    loop_length_intensity,
    sample_loop_soup,
    occupied_vacant,
)

__version__ = "0.1.0"
