#pragma once

#include "dethunt/analysis.hpp"
#include "dethunt/cantor.hpp"
#include "dethunt/error.hpp"
#include "dethunt/format.hpp"
#include "dethunt/gallery.hpp"
#include "dethunt/infer.hpp"
#include "dethunt/interval.hpp"
#include "dethunt/io.hpp"
#include "dethunt/path.hpp"
#include "dethunt/process.hpp"
#include "dethunt/raw_families.hpp"
#include "dethunt/report.hpp"
#include "dethunt/specdsl.hpp"
#include "dethunt/structure.hpp"
#include "dethunt/test_functions.hpp"
