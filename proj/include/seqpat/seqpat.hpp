#pragma once

#include "core.hpp"
#include "delimit.hpp"
#include "io.hpp"
#include "mine.hpp"
#include "model.hpp"
#include "modelsel.hpp"
#include "parallel.hpp"
#include "pattern_tree.hpp"
#include "report.hpp"
#include "solver.hpp"
#include "spp.hpp"
