#pragma once

#include "wlansat/bianchi.hpp"
#include "wlansat/ctmc.hpp"
#include "wlansat/errors.hpp"
#include "wlansat/io.hpp"
#include "wlansat/scenario.hpp"
#include "wlansat/scenarios.hpp"
#include "wlansat/simulator.hpp"
#include "wlansat/throughput.hpp"
