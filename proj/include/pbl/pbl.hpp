#pragma once

#include "pbl/error.hpp"
#include "pbl/metric.hpp"
#include "pbl/polynomial.hpp"
#include "pbl/confocal.hpp"
#include "pbl/relativistic.hpp"
#include "pbl/billiard.hpp"
#include "pbl/periodicity.hpp"
