#pragma once

namespace rscorrect {

const char* toolkit_version();

}  // namespace rscorrect
