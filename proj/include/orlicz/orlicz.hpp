#pragma once

#include "orlicz/config.hpp"
#include "orlicz/error.hpp"
#include "orlicz/estimates.hpp"
#include "orlicz/gallery.hpp"
#include "orlicz/komlos.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/parallel.hpp"
#include "orlicz/report.hpp"
#include "orlicz/risk.hpp"
#include "orlicz/space.hpp"
#include "orlicz/young.hpp"
