#pragma once

// Main-content extraction from HTML by chars-nodes ratio (CNR).

#include "cnr/blocks.hpp"
#include "cnr/dom.hpp"
#include "cnr/error.hpp"
#include "cnr/eval.hpp"
#include "cnr/html_parser.hpp"
#include "cnr/path.hpp"
#include "cnr/ratio.hpp"
#include "cnr/render.hpp"
#include "cnr/text.hpp"
