#pragma once

#include "bms/discrete.hpp"
#include "bms/error.hpp"
#include "bms/json_io.hpp"
#include "bms/linprog.hpp"
#include "bms/model.hpp"
#include "bms/polytope.hpp"
#include "bms/rational.hpp"
#include "bms/safety.hpp"
#include "bms/sim.hpp"
#include "bms/synthesis.hpp"
