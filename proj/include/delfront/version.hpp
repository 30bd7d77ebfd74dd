#pragma once

#define DELFRONT_VERSION "0.1.0"
