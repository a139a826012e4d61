// Typed client for the completion service's /v1 endpoints.
//
// The transport is injected so tests can script responses; the default one
// wraps fetch. Wire field names match the service exactly (snake_case).

export interface TransportResponse {
  status: number;
  body: unknown;
}

export type Transport = (
  url: string,
  init: { method: string; headers?: Record<string, string>; body?: string },
) => Promise<TransportResponse>;

export const fetchTransport: Transport = async (url, init) => {
  const resp = await fetch(url, init);
  let body: unknown = null;
  try {
    body = await resp.json();
  } catch {
    body = null;
  }
  return { status: resp.status, body };
};

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface CompleteRequest {
  context: string[];
  seed?: number;
  k?: number;
  min_tokens?: number;
  max_tokens?: number;
  window?: number;
  rerank?: boolean;
  num_candidates?: number;
}

export interface WireCandidate {
  line: string;
  rhyme_density: number;
  slur_score: number;
  seed_offset: number;
}

export interface CompleteResponse {
  line: string;
  tokens: string[];
  seed: number;
  ended_by_separator: boolean;
  rhyme_density: number;
  slur_score: number;
  candidates: WireCandidate[];
}

export interface ScoreMatch {
  line_index: number;
  token_index: number;
  surface: string;
  category: string;
  severity: number;
}

export interface ScoreResponse {
  slur_score: number;
  matches: ScoreMatch[];
  lines: { line_index: number; token_count: number; ws_score: number }[];
}

export interface RhymeDensityRequest {
  text?: string;
  tokens?: string[];
  window?: number;
}

export interface RhymeDensityResponse {
  density: number;
  high: boolean;
  oov_count: number;
  window: number;
  tokens: { token: string; skeleton: string[]; score: number }[];
}

export interface HealthResponse {
  status: string;
  model: string;
}

function errorMessage(status: number, body: unknown): string {
  if (body !== null && typeof body === "object" && "error" in body) {
    return String((body as { error: unknown }).error);
  }
  return `service returned HTTP ${status}`;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly transport: Transport = fetchTransport,
  ) {}

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const { status, body } = await this.transport(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (status < 200 || status >= 300) throw new ApiError(status, errorMessage(status, body));
    return body as T;
  }

  async health(): Promise<HealthResponse> {
    const { status, body } = await this.transport(this.baseUrl + "/v1/health", {
      method: "GET",
    });
    if (status !== 200) throw new ApiError(status, errorMessage(status, body));
    return body as HealthResponse;
  }

  complete(request: CompleteRequest): Promise<CompleteResponse> {
    return this.post("/v1/complete", request);
  }

  score(lines: string[]): Promise<ScoreResponse> {
    return this.post("/v1/score", { lines });
  }

  rhymeDensity(request: RhymeDensityRequest): Promise<RhymeDensityResponse> {
    return this.post("/v1/rhyme-density", request);
  }
}
