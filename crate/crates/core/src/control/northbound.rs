//! JSON request/response surface of the parent controller.

use serde::{Deserialize, Serialize};

use super::{ConnectivityService, Controller, CreateServiceRequest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NorthboundRequest {
    CreateConnectivityService(CreateServiceRequest),
    DeleteConnectivityService { id: String },
    GetConnectivityService { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NorthboundResponse {
    Service { service: ConnectivityService },
    Error { error: ErrorBody },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    /// The FAILED record, when a create got past planning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service: Option<ConnectivityService>,
}

impl Controller {
    pub fn handle(&mut self, request: &NorthboundRequest) -> NorthboundResponse {
        let result = match request {
            NorthboundRequest::CreateConnectivityService(req) => {
                self.create_connectivity_service(req).map_err(|f| ErrorBody {
                    code: f.error.code().to_string(),
                    message: f.error.to_string(),
                    service: f.service.map(|s| *s),
                })
            }
            NorthboundRequest::DeleteConnectivityService { id } => {
                self.delete_connectivity_service(id).map_err(Into::into)
            }
            NorthboundRequest::GetConnectivityService { id } => self.get_service(id).map_err(Into::into),
        };
        match result {
            Ok(service) => NorthboundResponse::Service { service },
            Err(error) => NorthboundResponse::Error { error },
        }
    }

    /// Handles one JSON request document; malformed input yields a
    /// `PARSE_ERROR` response.
    pub fn handle_json(&mut self, request: &str) -> String {
        let response = match serde_json::from_str::<NorthboundRequest>(request) {
            Ok(req) => self.handle(&req),
            Err(e) => NorthboundResponse::Error {
                error: ErrorBody { code: "PARSE_ERROR".into(), message: e.to_string(), service: None },
            },
        };
        serde_json::to_string(&response).expect("responses serialize")
    }
}

impl From<super::ControlError> for ErrorBody {
    fn from(e: super::ControlError) -> Self {
        ErrorBody { code: e.code().to_string(), message: e.to_string(), service: None }
    }
}
