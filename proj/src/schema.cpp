#include "domsplit/schema.hpp"

#include "domsplit/schema_text.hpp"

namespace domsplit {

const char* config_schema() { return generated::config_schema; }
const char* report_schema() { return generated::report_schema; }

}  // namespace domsplit
