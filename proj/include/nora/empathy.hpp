#pragma once

#include "nora/empathy/fusion.hpp"
#include "nora/empathy/lexicon.hpp"
#include "nora/empathy/scorers.hpp"
#include "nora/empathy/service.hpp"
#include "nora/empathy/types.hpp"
