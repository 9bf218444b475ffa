/* Exercises the C interface from C. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "halo/halo.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static int contains(const char* s, const char* part) { return s && strstr(s, part) != NULL; }

int main(void) {
  halo_group* g = NULL;
  char* out = NULL;

  EXPECT(strcmp(halo_version(), "0.1.0") == 0);

  EXPECT(halo_group_create("upcloner(GF2, Z^2)", &g) == HALO_ERR_PARSE);
  EXPECT(g == NULL);
  EXPECT(contains(halo_last_error(), "order required: use Z^2:lex"));
  EXPECT(halo_last_error_offset() == 14);
  EXPECT(halo_group_create("frobnicator(Z)", &g) == HALO_ERR_PARSE);
  EXPECT(halo_group_create(NULL, &g) == HALO_ERR_CONTRACT);

  EXPECT(halo_group_create(" wreath( C2 , Z )", &g) == HALO_OK);
  EXPECT(strcmp(halo_last_error(), "") == 0);
  EXPECT(halo_group_descriptor(g, &out) == HALO_OK);
  EXPECT(strcmp(out, "wreath(C2, Z)") == 0);
  halo_string_free(out);
  out = NULL;

  EXPECT(halo_ball(g, "{\"radius\": 1}", &out) == HALO_OK);
  if (!out) fprintf(stderr, "ball: %s\n", halo_last_error());
  EXPECT(contains(out, "\"sphere_sizes\":[1,3]"));
  halo_string_free(out);
  out = NULL;

  EXPECT(halo_profile(g, "{\"method\": \"exact\", \"n_max\": 4, \"radius\": 4}", &out) == HALO_OK);
  EXPECT(contains(out, "4,2,3,exact,false,4"));
  halo_string_free(out);
  out = NULL;
  EXPECT(halo_profile(g, "{\"method\": \"exact\", \"p\": 2}", &out) == HALO_ERR_CONTRACT);
  EXPECT(contains(halo_last_error(), "p = 1 only"));
  EXPECT(halo_profile(g, "{\"method\": ", &out) == HALO_ERR_PARSE);
  EXPECT(halo_profile(g, "{\"method\": \"anneal\", \"n_max\": 3}", &out) == HALO_ERR_CONTRACT);

  EXPECT(halo_lift(g, "{\"indicator\": [\"0\", \"1\"], \"ps\": [1]}", &out) == HALO_OK);
  EXPECT(contains(out, "\"support_matches\":true"));
  EXPECT(contains(out, "\"equal\":true"));
  EXPECT(contains(out, "\"expected_support\":\"32\""));
  halo_string_free(out);
  out = NULL;

  EXPECT(halo_growth(g, "{\"n_max\": 3, \"radius\": 2}", &out) == HALO_OK);
  EXPECT(contains(out, "\"closed_form\":\"8\""));
  halo_string_free(out);
  out = NULL;

  EXPECT(halo_net(g, "{\"radius\": 6, \"D\": 0}", &out) == HALO_OK);
  EXPECT(contains(out, "\"commutativity\":{\"D\":0"));
  halo_string_free(out);
  out = NULL;

  EXPECT(halo_embed_check(g, "{\"kind\": \"wreath_in_shuffler\"}", &out) == HALO_ERR_CONTRACT);
  EXPECT(halo_decompose(g, "{\"random\": {\"length\": 12, \"seed\": 3}}", &out) == HALO_OK);
  EXPECT(contains(out, "\"verified\":true"));
  halo_string_free(out);
  out = NULL;
  halo_group_free(g);

  EXPECT(halo_group_create("shuffler(Z)", &g) == HALO_OK);
  EXPECT(halo_ystar(g, "{\"radius\": 3, \"D\": 1}", &out) == HALO_OK);
  EXPECT(contains(out, "\"isomorphic\":true"));
  EXPECT(contains(out, "\"vertices\":24"));
  halo_string_free(out);
  out = NULL;
  EXPECT(halo_embed_check(g, "{\"kind\": \"shuffler_endomorphism\", \"radius\": 3, \"pairs\": 200}", &out) == HALO_OK);
  EXPECT(contains(out, "\"homomorphism\":true"));
  EXPECT(!contains(out, "\"outside_image\":null"));
  halo_string_free(out);
  out = NULL;
  EXPECT(halo_embed_check(g, "{\"kind\": \"lamplighter\"}", &out) == HALO_ERR_UNSUPPORTED);
  EXPECT(halo_bounds(g, "{\"method\": \"greedy\", \"n_max\": 6, \"phi_inverse\": [18]}", &out) == HALO_OK);
  EXPECT(contains(out, "finite-range indication, not a proof"));
  EXPECT(contains(out, "\"phi_inverse\":2.99999999999"));
  halo_string_free(out);
  out = NULL;
  halo_group_free(g);

  EXPECT(halo_group_create("upcloner(GF2, Z^2:lex)", &g) == HALO_OK);
  EXPECT(halo_decompose(g, "{\"element\": {\"lamp\": {\"variant\": \"matrix\", \"entries\": []}, \"cursor\": \"(0,0)\"}}", &out) !=
         HALO_ERR_INTERNAL);
  if (out) halo_string_free(out);
  out = NULL;
  halo_group_free(g);

  EXPECT(halo_ball(NULL, NULL, &out) == HALO_ERR_CONTRACT);
  EXPECT(halo_run_experiment("/nonexistent/config.json", "/tmp/halo_capi_out", &out) == HALO_ERR_CONTRACT);

  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  printf("C interface: all checks passed\n");
  return 0;
}
