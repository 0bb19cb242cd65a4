#pragma once

#include "nora/dialogue/activity.hpp"
#include "nora/dialogue/serialize.hpp"
#include "nora/dialogue/service.hpp"
#include "nora/dialogue/session.hpp"
#include "nora/dialogue/summary.hpp"
#include "nora/dialogue/templates.hpp"
