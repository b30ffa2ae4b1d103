#pragma once

#include "autfix/free_group.hpp"
#include "autfix/automorphism.hpp"
#include "autfix/stallings.hpp"
#include "autfix/filtered_graph.hpp"
#include "autfix/paths.hpp"
#include "autfix/nielsen.hpp"
#include "autfix/engine.hpp"
#include "autfix/document.hpp"
