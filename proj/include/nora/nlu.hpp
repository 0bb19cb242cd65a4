#pragma once

#include "nora/nlu/classifier.hpp"
#include "nora/nlu/numbers.hpp"
#include "nora/nlu/ruleset.hpp"
