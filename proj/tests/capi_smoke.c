/* The public header must compile as C. */
#include <stdio.h>

#include "nblab.h"

int main(void) {
  double value = 0.0;
  nblab_distribution* d = NULL;
  if (nblab_rho_eval(1.0, 0.4, &value) != NBLAB_OK) return 1;
  if (nblab_distribution_parse("exp:2", &d) != NBLAB_OK) return 1;
  if (nblab_distribution_mean(d, &value) != NBLAB_OK || value != 0.5) return 1;
  nblab_distribution_free(d);
  if (nblab_distribution_parse("exp:-2", &d) == NBLAB_OK) return 1;
  printf("%s: %s\n", nblab_status_name(NBLAB_ERR_DATA), nblab_last_error());
  return 0;
}
