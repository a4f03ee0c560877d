#pragma once

#include "rational.hpp"
#include "mpoly.hpp"
#include "upoly.hpp"
#include "roots.hpp"
#include "ffdet.hpp"
#include "linalg.hpp"
#include "system.hpp"
#include "parser.hpp"
#include "leslie.hpp"
#include "equilibria.hpp"
#include "compactify.hpp"
#include "darboux.hpp"
#include "integrability.hpp"
#include "portrait.hpp"
#include "report.hpp"
