#pragma once

namespace domsplit {

const char* config_schema();
const char* report_schema();

}  // namespace domsplit
