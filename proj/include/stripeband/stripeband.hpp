#pragma once

#include "error.hpp"
#include "expansion.hpp"
#include "format.hpp"
#include "ingest.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "sideband.hpp"
#include "turing.hpp"
