#include <stdio.h>
#include "secure_swipt.h"
int main(void) {
  SwiptConfig *cfg = NULL; SwiptChannel *ch = NULL; SwiptResult *res = NULL;
  swipt_config_new(&cfg);
  swipt_config_set(cfg, "network.p_th_dbm", "45");
  swipt_channel_generate(cfg, 3, &ch);
  if (swipt_solve(cfg, ch, SWIPT_SCHEME_PROPOSED, &res) != SWIPT_STATUS_OK) { printf("%s\n", swipt_last_error()); return 1; }
  double r; swipt_result_secrecy_rate(res, &r);
  printf("version %s rate %.4f\n", swipt_version(), r);
  swipt_result_free(res); swipt_channel_free(ch); swipt_config_free(cfg);
  return 0;
}
