#include "rscorrect/version.hpp"

namespace rscorrect {

const char* toolkit_version() { return RSCORRECT_VERSION; }

}  // namespace rscorrect
