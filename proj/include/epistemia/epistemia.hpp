#pragma once

#include "types.hpp"
#include "model.hpp"
#include "complex.hpp"
#include "formula.hpp"
#include "actions.hpp"
#include "update.hpp"
#include "solvability.hpp"
#include "json_io.hpp"
#include "dot.hpp"
