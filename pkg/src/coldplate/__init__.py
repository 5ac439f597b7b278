"""Design and analysis toolkit for liquid-cooled cold plates.

Sizes channels, predicts pressure drop and module temperatures with both a
resistance-network model and a finite-volume conduction solver, and
searches the design space for the lightest plate meeting a temperature
limit.
"""

from .geometry import (Assembly, ChannelLayout, DieSource, ModulePlacement,
                       PlateGeometry, Rectangular, Semicircular,
                       cross_section_area, equal_area_radius,
                       hydraulic_diameter, plate_mass, primary_side,
                       secondary_side, total_wetted_area, validate,
                       wetted_perimeter)
from .hydraulics import (FlowCondition, HydraulicsReport, friction_factor,
                         mass_flow_total, pressure_drop, reynolds,
                         transition_velocity)
from .properties import (CoolantProps, SolidMaterial, get_material,
                         water_at_reference)
from .thermal import (DieStack, ThermalReport, coolant_outlet,
                      default_die_stack, heat_transfer_coefficient, nusselt,
                      solve_network)

__version__ = "0.1.0"
