#pragma once

#include "fsopoint/errors.hpp"
#include "fsopoint/geometry.hpp"
#include "fsopoint/metrics.hpp"
#include "fsopoint/models.hpp"
#include "fsopoint/oracle.hpp"
#include "fsopoint/quadrature.hpp"
#include "fsopoint/special.hpp"
#include "fsopoint/stats.hpp"
