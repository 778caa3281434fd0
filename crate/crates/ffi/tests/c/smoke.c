#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "photon_focus.h"

#define CHECK(expr)                                                   \
  do {                                                                \
    if (!(expr)) {                                                    \
      fprintf(stderr, "check failed: %s (line %d)\n", #expr, __LINE__); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  PfChain *chain = NULL;
  CHECK(pf_chain_new(4, M_PI, &chain) == PF_STATUS_OK);

  double zeros[4] = {0.0, 0.0, 0.0, 0.0};
  double g = 0.0;
  CHECK(pf_g_m(chain, zeros, 4, PF_ROUTE_PATHS, &g) == PF_STATUS_OK);
  CHECK(fabs(g - 576.0) < 1e-9);

  PfState *cond = NULL, *w = NULL;
  CHECK(pf_state_conditional(chain, zeros, 3, &cond) == PF_STATUS_OK);
  CHECK(pf_state_w(4, &w) == PF_STATUS_OK);
  double re = 0.0, im = 0.0;
  CHECK(pf_state_overlap(cond, w, &re, &im) == PF_STATUS_OK);
  CHECK(fabs(re * re + im * im - 1.0) < 1e-10);

  PfSweep *sweep = NULL;
  CHECK(pf_sweep(chain, 4, 0.0, 201, PF_ROUTE_AUTO, &sweep) == PF_STATUS_OK);
  size_t len = 0;
  CHECK(pf_sweep_len(sweep, &len) == PF_STATUS_OK && len == 201);
  double *norm = malloc(len * sizeof(double));
  CHECK(pf_sweep_copy(sweep, NULL, NULL, norm, len) == PF_STATUS_OK);
  CHECK(norm[100] == 1.0);
  free(norm);

  CHECK(pf_chain_new(0, M_PI, &chain) == PF_STATUS_INVALID_INPUT);
  CHECK(pf_last_error_message() != NULL);

  pf_sweep_free(sweep);
  pf_state_free(cond);
  pf_state_free(w);
  pf_chain_free(chain);
  printf("ok\n");
  return 0;
}
