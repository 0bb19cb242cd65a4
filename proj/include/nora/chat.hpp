#pragma once

#include "nora/chat/providers.hpp"
#include "nora/chat/server.hpp"
#include "nora/chat/types.hpp"
