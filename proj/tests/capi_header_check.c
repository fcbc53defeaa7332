/* The public header must compile as C. */
#include <clockback/clockback.h>

int clockback_header_is_c(void) {
  cb_clock_spec c = {1.0, 10.0, 1.0};
  cb_clock_quality q;
  return cb_clock_quality_eval(&c, &q) == CB_OK ? 0 : 1;
}
