#pragma once

// Umbrella header.

#include "cfinsler/errors.hpp"
#include "cfinsler/linalg.hpp"
#include "cfinsler/asym_norm.hpp"
#include "cfinsler/convex_analysis.hpp"
#include "cfinsler/finsler_field.hpp"
#include "cfinsler/geodesic_field.hpp"
#include "cfinsler/trajectory.hpp"
#include "cfinsler/integrator.hpp"
#include "cfinsler/trajectory_io.hpp"
#include "cfinsler/qh_plane.hpp"
#include "cfinsler/metric_oracle.hpp"
#include "cfinsler/config.hpp"
#include "cfinsler/scenarios.hpp"
