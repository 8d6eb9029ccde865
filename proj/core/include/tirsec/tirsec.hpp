#pragma once

#include "tirsec/alias.hpp"
#include "tirsec/callgraph.hpp"
#include "tirsec/cfg.hpp"
#include "tirsec/class_hierarchy.hpp"
#include "tirsec/class_types.hpp"
#include "tirsec/context.hpp"
#include "tirsec/diagnostics.hpp"
#include "tirsec/hssa.hpp"
#include "tirsec/ir.hpp"
#include "tirsec/parser.hpp"
#include "tirsec/pipeline.hpp"
#include "tirsec/privilege.hpp"
#include "tirsec/ranking.hpp"
#include "tirsec/report.hpp"
#include "tirsec/rules.hpp"
#include "tirsec/side_effects.hpp"
#include "tirsec/taint.hpp"
#include "tirsec/validate.hpp"
