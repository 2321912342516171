use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};

/// One image and its Iconclass codes in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub codes: Vec<String>,
}

impl AnnotationRecord {
    pub fn new(
        image_id: impl Into<String>,
        codes: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        AnnotationRecord {
            image_id: image_id.into(),
            codes: codes.into_iter().map(Into::into).collect(),
        }
    }
}

/// Parses `{"image.jpg": ["73", "11F"], ...}` keeping file order.
pub fn parse_annotations(text: &str) -> Result<Vec<AnnotationRecord>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::schema("annotations", e.to_string()))?;
    let Value::Object(object) = value else {
        return Err(Error::schema("annotations", "top level must be an object"));
    };
    object
        .into_iter()
        .map(|(image_id, codes)| {
            let Value::Array(items) = codes else {
                return Err(Error::schema(
                    image_id,
                    "value must be an array of notation strings",
                ));
            };
            let codes = items
                .into_iter()
                .map(|item| match item {
                    Value::String(s) => Ok(s),
                    other => Err(Error::schema(
                        image_id.clone(),
                        format!("non-string code {other}"),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnnotationRecord { image_id, codes })
        })
        .collect()
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<AnnotationRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(&text)
}
