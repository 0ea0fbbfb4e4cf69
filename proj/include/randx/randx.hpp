#pragma once

#include "randx/catalog.hpp"
#include "randx/classicaloracle.hpp"
#include "randx/convexity.hpp"
#include "randx/devicemodel.hpp"
#include "randx/gamedefs.hpp"
#include "randx/io.hpp"
#include "randx/matcore.hpp"
#include "randx/protocol.hpp"
#include "randx/scoring.hpp"
